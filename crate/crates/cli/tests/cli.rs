use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triplet-lcd")).args(args).output().expect("spawn binary")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bound_matches_known_value() {
    let v: f64 = ok(&["bound", "--n", "112"]).trim().parse().unwrap();
    assert!((v - 0.6909).abs() <= 5e-4, "{v}");
    let v: f64 = ok(&["bound", "--n", "112", "--prior", "dag-bk"]).trim().parse().unwrap();
    assert!((v - 0.7703).abs() <= 5e-4, "{v}");
}

#[test]
fn priors_report_counts_and_weights() {
    let out = ok(&["priors", "--kind", "dag"]);
    let last = out.lines().last().unwrap();
    assert_eq!(last.split('\t').nth(3), Some("25"));
    let total: f64 = out
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with("all"))
        .map(|l| l.split('\t').nth(4).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
    let table = ok(&["priors", "--table"]);
    assert!(table.lines().last().unwrap().starts_with("all\t-\t25\t12\t"));
}

#[test]
fn triplet_round_trip_recovers_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let scan = dir.path().join("scan.tsv");
    ok(&["simulate", "triplet", "--model", "causal", "--n", "2000", "--seed", "3", "--out-dir", p(&data)]);
    ok(&[
        "scan",
        "--markers",
        p(&data.join("markers.tsv")),
        "--traits",
        p(&data.join("traits.tsv")),
        "--output",
        p(&scan),
    ]);
    let text = fs::read_to_string(&scan).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("regulator\ttarget\tprobability\tbest_marker"));
    let top: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(&top[..2], ["X2", "X3"]);
    assert_eq!(top[3], "X1");
    let bound: f64 = ok(&["bound", "--n", "2000"]).trim().parse().unwrap();
    for line in text.lines().skip(1) {
        let prob: f64 = line.split('\t').nth(2).unwrap().parse().unwrap();
        assert!((0.0..=bound).contains(&prob));
    }
    assert!(top[2].parse::<f64>().unwrap() > 0.5);
}

#[test]
fn simulation_and_scan_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run_id in ["a", "b"] {
        let data = dir.path().join(run_id);
        let scan = dir.path().join(format!("{run_id}.scan.tsv"));
        ok(&[
            "simulate",
            "grn",
            "--traits",
            "12",
            "--markers",
            "10",
            "--edges",
            "15",
            "--n",
            "300",
            "--seed",
            "9",
            "--out-dir",
            p(&data),
        ]);
        ok(&[
            "scan",
            "--markers",
            p(&data.join("markers.tsv")),
            "--traits",
            p(&data.join("traits.tsv")),
            "--threads",
            if run_id == "a" { "1" } else { "3" },
            "--output",
            p(&scan),
        ]);
        let files = ["markers.tsv", "traits.tsv", "truth.tsv", "meta.json"].map(|f| fs::read(data.join(f)).unwrap());
        outputs.push((files, fs::read(&scan).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn evaluate_scores_a_simulated_network() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let scan = dir.path().join("scan.tsv");
    let prefix = dir.path().join("eval");
    ok(&[
        "simulate",
        "grn",
        "--traits",
        "15",
        "--markers",
        "15",
        "--edges",
        "20",
        "--n",
        "500",
        "--seed",
        "1",
        "--out-dir",
        p(&data),
    ]);
    let traits = data.join("traits.tsv");
    ok(&["scan", "--markers", p(&data.join("markers.tsv")), "--traits", p(&traits), "--output", p(&scan)]);
    let out = ok(&[
        "evaluate",
        "--scan",
        p(&scan),
        "--truth",
        p(&data.join("truth.tsv")),
        "--traits",
        p(&traits),
        "--ancestral",
        "--out-prefix",
        p(&prefix),
    ]);
    let metric = |name: &str| -> f64 {
        let line = out.lines().find(|l| l.starts_with(&format!("{name}\t"))).unwrap();
        line.split('\t').nth(1).unwrap().parse().unwrap()
    };
    assert_eq!(metric("pairs"), 210.0);
    assert!(metric("positives") > 0.0);
    assert!((0.0..=1.0).contains(&metric("roc_auc")));
    assert!((0.0..=1.0).contains(&metric("pr_auc")));
    for ext in [".roc.tsv", ".pr.tsv", ".calibration.tsv"] {
        assert!(dir.path().join(format!("eval{ext}")).exists(), "{ext}");
    }
}

#[test]
fn failures_exit_nonzero_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let markers = dir.path().join("markers.tsv");
    let traits = dir.path().join("traits.tsv");
    let scan = dir.path().join("scan.tsv");
    fs::write(&markers, "L1\n0\n1\n0\n1\n").unwrap();
    fs::write(&traits, "T1\tT2\n1.0\t2.0\nabc\t1.0\n0.5\t0.1\n2.0\t0.3\n").unwrap();
    let out = run(&["scan", "--markers", p(&markers), "--traits", p(&traits), "--output", p(&scan)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    assert!(!scan.exists());
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 2, "{leftovers:?}");

    assert!(!run(&["bound", "--n", "100", "--nu", "2"]).status.success());
    assert!(!run(&["bound", "--n", "100", "--q", "1.5"]).status.success());
    assert!(!run(&[
        "simulate",
        "triplet",
        "--model",
        "causal",
        "--n",
        "10",
        "--noise",
        "bernoulli",
        "--bernoulli-p",
        "1.5",
        "--out-dir",
        p(&dir.path().join("x"))
    ])
    .status
    .success());
}
