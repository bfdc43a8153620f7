//! `triplet-lcd`: scan marker/trait data for causal chains, simulate test
//! data, evaluate scans against known networks, and inspect priors.

use std::collections::{BTreeSet, HashMap};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use serde_json::json;

use triplet_lcd::data::{correlation_matrix, load_dataset, read_table, write_table, FormatOptions, Table};
use triplet_lcd::eval::{calibration_table, pr_auc, roc_auc, Binning, CalibrationBin, Curve, LabeledScores};
use triplet_lcd::graphs::{build_prior, class_counts, count_table, GraphKind, PriorSpec};
use triplet_lcd::scan::{full_scan, rank_edges, ScanOptions, ScanStrategy, NO_MARKER};
use triplet_lcd::sim::{
    gen_grn, gen_triplet_data, sample_grn_data, transitive_closure, EdgeDensity, GrnSpec, Noise, TripletModel,
    TripletSemSpec, GENERATOR,
};
use triplet_lcd::{posterior_upper_bound, CiModel, PriorWeights, DEFAULT_NU};

#[derive(Parser)]
#[command(name = "triplet-lcd", version, about = "Bayesian local causal discovery over marker/trait triplets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every ordered trait pair for a marker-anchored causal chain.
    Scan(ScanArgs),
    /// Generate synthetic data with known structure.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Compare a scan edge list with a true edge list.
    Evaluate(EvaluateArgs),
    /// Print graph counts and the prior they induce on the eleven CI models.
    Priors(PriorsArgs),
    /// Largest attainable chain posterior for a sample size and prior.
    Bound(BoundArgs),
}

#[derive(Args)]
struct PriorArgs {
    /// Graph prior preset.
    #[arg(long, default_value = "dmag-bk", value_parser = ["dag", "dmag", "dag-bk", "dmag-bk"])]
    prior: String,
    /// Per-pair edge probability; graphs weighted q^edges (1-q)^(3-edges).
    #[arg(long)]
    q: Option<f64>,
    /// File of `forbid A B` / `require A B` lines over X1, X2, X3.
    #[arg(long)]
    constraints: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// Maximum over all markers.
    Max,
    /// Marker most correlated with the regulator.
    Loclink,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    markers: PathBuf,
    #[arg(long)]
    traits: PathBuf,
    /// Field separator: a single character, `tab` or `comma`.
    #[arg(long, default_value = "tab", value_parser = parse_delimiter)]
    delimiter: u8,
    #[arg(long, default_value_t = DEFAULT_NU)]
    nu: f64,
    #[command(flatten)]
    prior: PriorArgs,
    #[arg(long, value_enum, default_value = "max")]
    strategy: StrategyArg,
    /// Worker threads, 0 = all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Keep only the highest ranked edges.
    #[arg(long)]
    top: Option<usize>,
    /// Edge list output (TSV).
    #[arg(long)]
    output: PathBuf,
    /// Optional full probability matrix output (TSV).
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SimulateCommand {
    /// Random linear network of traits driven by binary markers.
    Grn(GrnArgs),
    /// Three-variable linear SEM.
    Triplet(TripletArgs),
}

#[derive(Args)]
struct GrnArgs {
    /// Network preset (100 traits, 100 markers, 54 or 247 expected edges).
    #[arg(long, value_parser = ["sparse", "dense"])]
    preset: Option<String>,
    /// Number of traits.
    #[arg(long, required_unless_present = "preset")]
    traits: Option<usize>,
    /// Number of markers.
    #[arg(long, required_unless_present = "preset")]
    markers: Option<usize>,
    /// Expected number of trait-to-trait edges.
    #[arg(long, conflicts_with = "edge_prob")]
    edges: Option<f64>,
    /// Per-pair edge probability.
    #[arg(long)]
    edge_prob: Option<f64>,
    /// Probability that a marker affects a given trait.
    #[arg(long)]
    link_prob: Option<f64>,
    /// Samples.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Causal,
    Independent,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Bernoulli,
}

#[derive(Args)]
struct TripletArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Distribution of X1.
    #[arg(long, value_enum, default_value = "gaussian")]
    noise: NoiseArg,
    /// Bernoulli success probability; drawn from U(0.1, 0.5) when omitted.
    #[arg(long)]
    bernoulli_p: Option<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinningArg {
    Count,
    Width,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Edge list written by `scan`.
    #[arg(long)]
    scan: PathBuf,
    /// True edge list with `regulator` and `target` columns.
    #[arg(long)]
    truth: PathBuf,
    /// Close the true edges transitively before scoring.
    #[arg(long)]
    ancestral: bool,
    /// Trait table whose header fixes the set of traits; otherwise the
    /// names seen in the scan and truth files are used.
    #[arg(long)]
    traits: Option<PathBuf>,
    #[arg(long, default_value = "tab", value_parser = parse_delimiter)]
    delimiter: u8,
    #[arg(long, default_value_t = 5)]
    bins: usize,
    #[arg(long, value_enum, default_value = "count")]
    binning: BinningArg,
    /// Write PREFIX.roc.tsv, PREFIX.pr.tsv and PREFIX.calibration.tsv.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Dag,
    Dmag,
}

#[derive(Args)]
struct PriorsArgs {
    #[arg(long, value_enum, default_value = "dmag")]
    kind: KindArg,
    /// The first variable receives no arrowheads.
    #[arg(long)]
    bk: bool,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Print the count table for all four graph families instead.
    #[arg(long)]
    table: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = DEFAULT_NU)]
    nu: f64,
    #[command(flatten)]
    prior: PriorArgs,
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        "comma" => Ok(b','),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("expected a single ASCII character, `tab` or `comma`, got '{s}'")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scan(a) => run_scan(a),
        Command::Simulate(SimulateCommand::Grn(a)) => run_grn(a),
        Command::Simulate(SimulateCommand::Triplet(a)) => run_triplet(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Priors(a) => run_priors(a),
        Command::Bound(a) => run_bound(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Write through a temporary file in the target directory, renamed into
/// place only once `body` succeeds.
fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    body(tmp.as_file_mut()).with_context(|| format!("writing {}", path.display()))?;
    tmp.as_file_mut().flush()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn parse_node(tok: &str) -> Option<usize> {
    let digits = tok.strip_prefix('X').or_else(|| tok.strip_prefix('x')).unwrap_or(tok);
    match digits {
        "1" => Some(0),
        "2" => Some(1),
        "3" => Some(2),
        _ => None,
    }
}

/// Apply a constraint file to a prior spec.
fn read_constraints(path: &Path, spec: &mut PriorSpec) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad =
            || anyhow::anyhow!("{}:{}: expected `forbid|require A B` with A, B in X1..X3", path.display(), no + 1);
        if toks.len() != 3 {
            return Err(bad());
        }
        let edge = (parse_node(toks[1]).ok_or_else(bad)?, parse_node(toks[2]).ok_or_else(bad)?);
        match toks[0] {
            "forbid" => spec.forbidden_edges.push(edge),
            "require" => spec.required_edges.push(edge),
            _ => return Err(bad()),
        }
    }
    Ok(())
}

fn finish_spec(mut spec: PriorSpec, q: Option<f64>, constraints: Option<&Path>) -> Result<(PriorSpec, PriorWeights)> {
    spec.edge_prob_q = q;
    if let Some(path) = constraints {
        read_constraints(path, &mut spec)?;
    }
    let weights = build_prior(&spec).context("building the prior (--prior/--q/--constraints)")?;
    Ok((spec, weights))
}

fn prior_from_args(a: &PriorArgs) -> Result<(PriorSpec, PriorWeights)> {
    let spec = PriorSpec::preset(&a.prior).expect("clap restricts presets");
    finish_spec(spec, a.q, a.constraints.as_deref())
}

fn prior_label(a: &PriorArgs) -> String {
    let mut label = a.prior.clone();
    if let Some(q) = a.q {
        label.push_str(&format!(",q={q}"));
    }
    if a.constraints.is_some() {
        label.push_str(",constrained");
    }
    label
}

fn check_nu(nu: f64) -> Result<()> {
    if nu.is_nan() || nu <= 2.0 {
        bail!("--nu must be greater than 2, got {nu}");
    }
    Ok(())
}

fn run_scan(a: ScanArgs) -> Result<()> {
    check_nu(a.nu)?;
    let (_, prior) = prior_from_args(&a.prior)?;
    let started = Instant::now();
    eprintln!("loading {} and {}", a.markers.display(), a.traits.display());
    let data = load_dataset(&a.markers, &a.traits, FormatOptions { delimiter: a.delimiter })
        .with_context(|| format!("loading --markers {} / --traits {}", a.markers.display(), a.traits.display()))?;
    eprintln!(
        "{} samples, {} markers, {} traits; computing correlations",
        data.n_samples(),
        data.n_markers(),
        data.n_traits()
    );
    let corr = correlation_matrix(&data);
    let strategy = match a.strategy {
        StrategyArg::Max => ScanStrategy::MaxOverMarkers,
        StrategyArg::Loclink => ScanStrategy::LocalLinkage,
    };
    eprintln!("scanning ({strategy})");
    let opts = ScanOptions {
        nu: a.nu,
        strategy,
        threads: a.threads,
        prior_label: prior_label(&a.prior),
        ..Default::default()
    };
    let res = full_scan(&corr, &prior, &opts).context("running the scan")?;
    if res.meta.skipped > 0 {
        eprintln!("skipped {} degenerate triplets", res.meta.skipped);
    }
    let names = &data.traits().names;
    let markers = &data.markers().names;
    let edges = rank_edges(&res, a.top);
    write_atomic(&a.output, |w| {
        writeln!(w, "regulator\ttarget\tprobability\tbest_marker")?;
        for e in &edges {
            let marker = if e.best_marker == NO_MARKER { "NA" } else { markers[e.best_marker].as_str() };
            writeln!(w, "{}\t{}\t{}\t{}", names[e.regulator], names[e.target], e.probability, marker)?;
        }
        Ok(())
    })?;
    if let Some(path) = &a.matrix {
        write_atomic(path, |w| {
            writeln!(w, "regulator\t{}", names.join("\t"))?;
            for (i, row) in res.prob.rows().into_iter().enumerate() {
                write!(w, "{}", names[i])?;
                for v in row {
                    write!(w, "\t{v}")?;
                }
                writeln!(w)?;
            }
            Ok(())
        })?;
    }
    eprintln!("wrote {} edges in {:.2?}", edges.len(), started.elapsed());
    Ok(())
}

fn write_tsv_table(dir: &Path, name: &str, table: &Table) -> Result<()> {
    write_atomic(&dir.join(name), |w| write_table(w, table, b'\t'))
}

fn write_meta(dir: &Path, meta: serde_json::Value) -> Result<()> {
    write_atomic(&dir.join("meta.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &meta).map_err(io::Error::other)?;
        writeln!(w)
    })
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

fn run_grn(a: GrnArgs) -> Result<()> {
    let mut spec = match &a.preset {
        Some(p) => GrnSpec::preset(p, a.seed).expect("clap restricts presets"),
        None => GrnSpec::new(0, 0, EdgeDensity::ExpectedEdges(0.0), a.seed),
    };
    if let Some(m) = a.traits {
        spec.m = m;
    }
    if let Some(l) = a.markers {
        spec.l = l;
    }
    if let Some(e) = a.edges {
        spec.density = EdgeDensity::ExpectedEdges(e);
    }
    if let Some(p) = a.edge_prob {
        spec.density = EdgeDensity::Probability(p);
    }
    if let Some(p) = a.link_prob {
        spec.marker_link_prob = p;
    }
    if spec.m < 1 || spec.l < 1 {
        bail!("--traits and --markers must be at least 1");
    }
    let net = gen_grn(&spec).context("generating the network")?;
    let (markers, traits) = sample_grn_data(&net, a.n, a.seed);
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let trait_names = names("T", spec.m);
    write_tsv_table(&a.out_dir, "markers.tsv", &Table { names: names("L", spec.l), values: markers })?;
    write_tsv_table(&a.out_dir, "traits.tsv", &Table { names: trait_names.clone(), values: traits })?;
    write_atomic(&a.out_dir.join("truth.tsv"), |w| {
        writeln!(w, "regulator\ttarget\tcoefficient")?;
        for i in 0..spec.m {
            for j in 0..spec.m {
                if net.truth.direct[(i, j)] {
                    writeln!(w, "{}\t{}\t{}", trait_names[i], trait_names[j], net.b[(j, i)])?;
                }
            }
        }
        Ok(())
    })?;
    write_meta(
        &a.out_dir,
        json!({
            "kind": "grn",
            "generator": GENERATOR,
            "seed": a.seed,
            "n": a.n,
            "spec": spec,
            "direct_edges": net.truth.edge_count(),
            "ancestral_edges": net.truth.ancestral.iter().filter(|&&e| e).count(),
            "marker_links": net.a.iter().filter(|&&v| v != 0.0).count(),
        }),
    )?;
    eprintln!("wrote {} samples to {}", a.n, a.out_dir.display());
    Ok(())
}

fn run_triplet(a: TripletArgs) -> Result<()> {
    let spec = TripletSemSpec {
        model: match a.model {
            ModelArg::Causal => TripletModel::Causal,
            ModelArg::Independent => TripletModel::Independent,
            ModelArg::Full => TripletModel::Full,
        },
        noise1: match a.noise {
            NoiseArg::Gaussian => Noise::Gaussian,
            NoiseArg::Bernoulli => Noise::Bernoulli,
        },
        bernoulli_p: a.bernoulli_p,
        seed: a.seed,
    };
    let (x, params) = gen_triplet_data(&spec, a.n).context("--bernoulli-p")?;
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let markers = Table { names: vec!["X1".into()], values: x.slice(ndarray::s![.., 0..1]).to_owned() };
    let traits = Table { names: vec!["X2".into(), "X3".into()], values: x.slice(ndarray::s![.., 1..3]).to_owned() };
    write_tsv_table(&a.out_dir, "markers.tsv", &markers)?;
    write_tsv_table(&a.out_dir, "traits.tsv", &traits)?;
    write_atomic(&a.out_dir.join("truth.tsv"), |w| {
        writeln!(w, "regulator\ttarget\tcoefficient")?;
        if params.b32 != 0.0 {
            writeln!(w, "X2\tX3\t{}", params.b32)?;
        }
        Ok(())
    })?;
    write_meta(
        &a.out_dir,
        json!({
            "kind": "triplet",
            "generator": GENERATOR,
            "seed": a.seed,
            "n": a.n,
            "spec": spec,
            "params": params,
        }),
    )?;
    eprintln!("wrote {} samples to {}", a.n, a.out_dir.display());
    Ok(())
}

/// Rows of a headed delimited file as maps from column name to cell.
fn read_records(path: &Path, delimiter: u8, required: &[&str]) -> Result<Vec<HashMap<String, String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .quoting(false)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(|s| s.trim().to_string()).collect();
    for col in required {
        if !header.iter().any(|h| h == col) {
            bail!("{}: missing column '{col}'", path.display());
        }
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        out.push(header.iter().cloned().zip(rec.iter().map(|s| s.trim().to_string())).collect());
    }
    Ok(out)
}

fn run_evaluate(a: EvaluateArgs) -> Result<()> {
    let scan = read_records(&a.scan, a.delimiter, &["regulator", "target", "probability"])?;
    let truth = read_records(&a.truth, a.delimiter, &["regulator", "target"])?;
    let universe: Vec<String> = match &a.traits {
        Some(p) => {
            read_table(p, FormatOptions { delimiter: a.delimiter })
                .with_context(|| format!("reading --traits {}", p.display()))?
                .names
        }
        None => {
            let mut set = BTreeSet::new();
            for r in scan.iter().chain(&truth) {
                set.insert(r["regulator"].clone());
                set.insert(r["target"].clone());
            }
            set.into_iter().collect()
        }
    };
    let index: HashMap<&str, usize> = universe.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let m = universe.len();
    let lookup = |file: &Path, name: &str| -> Result<usize> {
        index.get(name).copied().with_context(|| format!("{}: unknown trait '{name}'", file.display()))
    };

    let mut prob = Array2::<f64>::zeros((m, m));
    for (row, r) in scan.iter().enumerate() {
        let (i, j) = (lookup(&a.scan, &r["regulator"])?, lookup(&a.scan, &r["target"])?);
        let p: f64 = r["probability"].parse().with_context(|| {
            format!("{}: row {}: bad probability '{}'", a.scan.display(), row + 1, r["probability"])
        })?;
        prob[(i, j)] = p;
    }
    let mut direct = Array2::from_elem((m, m), false);
    for r in &truth {
        direct[(lookup(&a.truth, &r["regulator"])?, lookup(&a.truth, &r["target"])?)] = true;
    }
    let truth = if a.ancestral { transitive_closure(&direct) } else { direct };

    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            scores.push(prob[(i, j)]);
            labels.push(truth[(i, j)]);
        }
    }
    let ls = LabeledScores::new(scores, labels).with_context(|| format!("scores in {}", a.scan.display()))?;
    let roc = roc_auc(&ls).context("ROC curve")?;
    let pr = pr_auc(&ls).context("precision-recall curve")?;
    let binning = match a.binning {
        BinningArg::Count => Binning::EqualCount,
        BinningArg::Width => Binning::EqualWidth,
    };
    let cal = calibration_table(&ls, a.bins, binning).context("calibration table (--bins)")?;

    if let Some(prefix) = &a.out_prefix {
        let with_ext = |ext: &str| {
            let mut s = prefix.clone().into_os_string();
            s.push(ext);
            PathBuf::from(s)
        };
        write_curve(&with_ext(".roc.tsv"), &roc, "fpr", "tpr")?;
        write_curve(&with_ext(".pr.tsv"), &pr, "recall", "precision")?;
        write_atomic(&with_ext(".calibration.tsv"), |w| write_calibration(w, &cal))?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "metric\tvalue")?;
    writeln!(out, "pairs\t{}", ls.len())?;
    writeln!(out, "positives\t{}", ls.positives())?;
    writeln!(out, "roc_auc\t{}", roc.auc)?;
    writeln!(out, "pr_auc\t{}", pr.auc)?;
    writeln!(out)?;
    write_calibration(&mut out, &cal)?;
    Ok(())
}

fn write_curve(path: &Path, c: &Curve, x: &str, y: &str) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "threshold\t{x}\t{y}")?;
        for p in &c.points {
            writeln!(w, "{}\t{}\t{}", p.threshold, p.x, p.y)?;
        }
        Ok(())
    })
}

fn write_calibration(w: &mut dyn Write, cal: &[CalibrationBin]) -> io::Result<()> {
    writeln!(w, "bin\tmean_score\tobserved\tcount")?;
    for (b, row) in cal.iter().enumerate() {
        writeln!(w, "{}\t{}\t{}\t{}", b + 1, row.mean_score, row.observed, row.count)?;
    }
    Ok(())
}

fn run_priors(a: PriorsArgs) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if a.table {
        writeln!(out, "model\tstatement\tdag\tdag_bk\tdmag\tdmag_bk")?;
        let table = count_table();
        let mut totals = [0; 4];
        for (model, row) in CiModel::all().zip(&table) {
            writeln!(out, "{model}\t{}\t{}\t{}\t{}\t{}", model.statement(), row[0], row[1], row[2], row[3])?;
            for (t, v) in totals.iter_mut().zip(row) {
                *t += v;
            }
        }
        writeln!(out, "all\t-\t{}\t{}\t{}\t{}", totals[0], totals[1], totals[2], totals[3])?;
        return Ok(());
    }
    let kind = match a.kind {
        KindArg::Dag => GraphKind::Dag,
        KindArg::Dmag => GraphKind::Dmag,
    };
    let base = if a.bk { PriorSpec::with_first_as_root(kind) } else { PriorSpec::uniform(kind) };
    let (spec, weights) = finish_spec(base, a.q, a.constraints.as_deref())?;
    let counts = class_counts(&spec);
    writeln!(out, "model\tcase\tstatement\tcount\tweight")?;
    for model in CiModel::all() {
        writeln!(
            out,
            "{model}\t{}\t{}\t{}\t{}",
            model.case(),
            model.statement(),
            counts[model.index()],
            weights.get(model)
        )?;
    }
    writeln!(out, "all\t-\t-\t{}\t1", counts.iter().sum::<usize>())?;
    Ok(())
}

fn run_bound(a: BoundArgs) -> Result<()> {
    check_nu(a.nu)?;
    let (_, prior) = prior_from_args(&a.prior)?;
    let b = posterior_upper_bound(a.n, a.nu, &prior).context("--n/--nu")?;
    println!("{b}");
    Ok(())
}
