//! Genome-wide triplet scan for chains `L_k → T_i → T_j`.
//!
//! Every cell `(i, j)` of the output holds the posterior of `L_k ⊥ T_j | T_i`
//! for the triplet `(X1, X2, X3) = (L_k, T_i, T_j)`, maximized over markers
//! or evaluated at a single preselected marker. The scan only reads the
//! precomputed correlation matrix, so its cost is independent of the sample
//! size.

use std::fmt;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bayes::{
    compute_log_bayes_factors, correlation_determinant, log_bayes_factors_from_terms, Prefactors, TripletCorrelation,
    TripletError, TripletTerms, MIN_DETERMINANT,
};
use crate::data::JointCorrelation;
use crate::posterior::{log_posterior_of, posterior_over_models, PriorWeights};
use crate::structure::CiModel;

/// Marker index stored for cells where no marker produced a usable triplet.
pub const NO_MARKER: usize = usize::MAX;

const CHAIN: CiModel = CiModel::INDEP_31_GIVEN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ScanStrategy {
    /// Maximum posterior over all markers.
    MaxOverMarkers,
    /// Single marker per regulator: the one most correlated (in absolute
    /// value) with it.
    LocalLinkage,
}

impl fmt::Display for ScanStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanStrategy::MaxOverMarkers => "max-over-markers",
            ScanStrategy::LocalLinkage => "local-linkage",
        })
    }
}

/// How the per-triplet posterior is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kernel {
    /// Marker blocks against precomputed `ln(1 - r²)` tables.
    #[default]
    Batch,
    /// One validated [`TripletCorrelation`] per triplet.
    Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub nu: f64,
    pub strategy: ScanStrategy,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
    pub kernel: Kernel,
    /// Free-form prior name recorded in the result.
    pub prior_label: String,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            nu: crate::bayes::DEFAULT_NU,
            strategy: ScanStrategy::MaxOverMarkers,
            threads: 0,
            kernel: Kernel::Batch,
            prior_label: String::from("custom"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanMeta {
    pub n: u64,
    pub nu: f64,
    pub prior_label: String,
    pub strategy: ScanStrategy,
    /// Triplets dropped because their correlation matrix was (near) singular.
    pub skipped: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// `prob[(i, j)]` estimates `p(T_i → T_j | D)`; the diagonal is 0.
    pub prob: Array2<f64>,
    /// Marker attaining `prob[(i, j)]`, or [`NO_MARKER`].
    pub best_marker: Array2<usize>,
    pub meta: ScanMeta,
}

impl ScanResult {
    pub fn n_traits(&self) -> usize {
        self.prob.nrows()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("a scan needs at least two traits, got {0}")]
    TooFewTraits(usize),
    #[error("a scan needs at least one marker")]
    NoMarkers,
    #[error(transparent)]
    Triplet(#[from] TripletError),
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
    #[error("trait index {0} out of range")]
    BadTrait(usize),
    #[error("edge ({i}, {j}) has probability {prob}, below the threshold {threshold}")]
    EdgeBelowThreshold { i: usize, j: usize, prob: f64, threshold: f64 },
}

/// Per-scan constants shared by every cell.
struct Kernels<'a> {
    corr: &'a JointCorrelation,
    pre: Prefactors,
    log_prior: [f64; CiModel::COUNT],
    /// Models with nonzero prior mass.
    support: Vec<usize>,
    /// `r(L_k, T_i)` laid out as `[i][k]`.
    r_mt: Array2<f64>,
    /// `ln(1 - r(L_k, T_i)²)`, same layout.
    l_mt: Array2<f64>,
}

impl<'a> Kernels<'a> {
    fn new(corr: &'a JointCorrelation, prior: &PriorWeights, nu: f64) -> Result<Self, ScanError> {
        let pre = Prefactors::new(corr.n_samples(), nu)?;
        let log_prior = prior.log_weights();
        let support = (0..CiModel::COUNT).filter(|&j| log_prior[j] > f64::NEG_INFINITY).collect();
        let (l, m) = (corr.n_markers(), corr.n_traits());
        let r_mt = Array2::from_shape_fn((m, l), |(i, k)| corr.marker_trait(k, i));
        let l_mt = r_mt.mapv(|r| (-r * r).ln_1p());
        Ok(Kernels { corr, pre, log_prior, support, r_mt, l_mt })
    }

    fn log_posterior(&self, t: &TripletTerms) -> f64 {
        let bf = log_bayes_factors_from_terms(&self.pre, t);
        let mut max = f64::NEG_INFINITY;
        let mut terms = [0.0; CiModel::COUNT];
        for &j in &self.support {
            terms[j] = bf.0[j] + self.log_prior[j];
            max = max.max(terms[j]);
        }
        let sum: f64 = self.support.iter().map(|&j| (terms[j] - max).exp()).sum();
        let target = bf.0[CHAIN.index()] + self.log_prior[CHAIN.index()];
        target - (max + sum.ln())
    }

    /// Log posterior of the chain for markers `ks` in cell `(i, j)`; `None`
    /// marks a degenerate triplet.
    fn batch(&self, i: usize, j: usize, ks: &[usize], out: &mut Vec<Option<f64>>) {
        out.clear();
        let r23 = self.corr.trait_trait(i, j);
        let l23 = (-r23 * r23).ln_1p();
        let (ri, rj) = (self.r_mt.row(i), self.r_mt.row(j));
        let (li, lj) = (self.l_mt.row(i), self.l_mt.row(j));
        for &k in ks {
            let (r12, r13) = (ri[k], rj[k]);
            let det = correlation_determinant(r12, r13, r23);
            if det <= MIN_DETERMINANT {
                out.push(None);
                continue;
            }
            let t = TripletTerms { l12: li[k], l23, l13: lj[k], ldet: det.ln() };
            out.push(Some(self.log_posterior(&t)));
        }
    }

    fn scalar(&self, i: usize, j: usize, k: usize, prior: &PriorWeights) -> Option<f64> {
        let t = self.corr.triplet(k, i, j, self.pre.nu).ok()?;
        if t.determinant() <= MIN_DETERMINANT {
            return None;
        }
        Some(log_posterior_of(&compute_log_bayes_factors(&t), prior, CHAIN))
    }
}

/// Index of the marker most correlated with each trait; ties go low.
pub fn local_linkage_markers(corr: &JointCorrelation) -> Vec<usize> {
    (0..corr.n_traits())
        .map(|i| {
            let mut best = 0;
            for k in 1..corr.n_markers() {
                if corr.marker_trait(k, i).abs() > corr.marker_trait(best, i).abs() {
                    best = k;
                }
            }
            best
        })
        .collect()
}

/// Run the scan over all ordered trait pairs.
pub fn full_scan(corr: &JointCorrelation, prior: &PriorWeights, opts: &ScanOptions) -> Result<ScanResult, ScanError> {
    let (l, m) = (corr.n_markers(), corr.n_traits());
    if m < 2 {
        return Err(ScanError::TooFewTraits(m));
    }
    if l < 1 {
        return Err(ScanError::NoMarkers);
    }
    let kernels = Kernels::new(corr, prior, opts.nu)?;
    let all: Vec<usize> = (0..l).collect();
    let linkage = local_linkage_markers(corr);

    let row = |i: usize| -> (Vec<f64>, Vec<usize>, u64) {
        let mut prob = vec![0.0; m];
        let mut best = vec![NO_MARKER; m];
        let mut skipped = 0;
        let mut buf = Vec::with_capacity(l);
        let ks: &[usize] = match opts.strategy {
            ScanStrategy::MaxOverMarkers => &all,
            ScanStrategy::LocalLinkage => std::slice::from_ref(&linkage[i]),
        };
        for j in (0..m).filter(|&j| j != i) {
            match opts.kernel {
                Kernel::Batch => kernels.batch(i, j, ks, &mut buf),
                Kernel::Scalar => {
                    buf.clear();
                    buf.extend(ks.iter().map(|&k| kernels.scalar(i, j, k, prior)));
                }
            }
            let mut top: Option<(f64, usize)> = None;
            for (&k, lp) in ks.iter().zip(&buf) {
                match *lp {
                    None => skipped += 1,
                    Some(lp) => {
                        if top.is_none_or(|(b, _)| lp > b) {
                            top = Some((lp, k));
                        }
                    }
                }
            }
            if let Some((lp, k)) = top {
                prob[j] = lp.exp();
                best[j] = k;
            }
        }
        (prob, best, skipped)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| ScanError::ThreadPool(e.to_string()))?;
    let rows: Vec<_> = pool.install(|| (0..m).into_par_iter().map(row).collect());

    let mut prob = Array2::zeros((m, m));
    let mut best_marker = Array2::from_elem((m, m), NO_MARKER);
    let mut skipped = 0;
    for (i, (p, b, s)) in rows.into_iter().enumerate() {
        prob.row_mut(i).assign(&ndarray::ArrayView1::from(&p));
        best_marker.row_mut(i).assign(&ndarray::ArrayView1::from(&b));
        skipped += s;
    }
    Ok(ScanResult {
        prob,
        best_marker,
        meta: ScanMeta {
            n: corr.n_samples(),
            nu: opts.nu,
            prior_label: opts.prior_label.clone(),
            strategy: opts.strategy,
            skipped,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankedEdge {
    pub regulator: usize,
    pub target: usize,
    pub probability: f64,
    pub best_marker: usize,
}

/// Off-diagonal cells by decreasing probability, ties in `(i, j)` order.
pub fn rank_edges(res: &ScanResult, top_k: Option<usize>) -> Vec<RankedEdge> {
    let m = res.n_traits();
    let mut edges: Vec<RankedEdge> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| RankedEdge {
            regulator: i,
            target: j,
            probability: res.prob[(i, j)],
            best_marker: res.best_marker[(i, j)],
        })
        .collect();
    // stable, so equal probabilities keep (i, j) order
    edges.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    if let Some(k) = top_k {
        edges.truncate(k);
    }
    edges
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// `T_i ⊥ T_j | T_m` is probable: the effect runs through `T_m`.
    Mediated,
    /// A direct component cannot be ruled out.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MediatorCandidate {
    pub mediator: usize,
    pub prob_in: f64,
    pub prob_out: f64,
    /// Posterior of `T_i ⊥ T_j | T_m`; `None` for a degenerate triplet.
    pub posterior: Option<f64>,
    pub verdict: Verdict,
}

/// Look for single traits `T_m` that carry the effect of `T_i` on `T_j`.
pub fn mediation_scan(
    res: &ScanResult,
    corr: &JointCorrelation,
    prior: &PriorWeights,
    nu: f64,
    edge: (usize, usize),
    threshold: f64,
) -> Result<Vec<MediatorCandidate>, ScanError> {
    let (i, j) = edge;
    let m = res.n_traits();
    for idx in [i, j] {
        if idx >= m || corr.n_traits() != m {
            return Err(ScanError::BadTrait(idx));
        }
    }
    let prob = res.prob[(i, j)];
    if i == j || !(prob >= threshold) {
        return Err(ScanError::EdgeBelowThreshold { i, j, prob, threshold });
    }
    let mut out = Vec::new();
    for t in (0..m).filter(|&t| t != i && t != j) {
        let (prob_in, prob_out) = (res.prob[(i, t)], res.prob[(t, j)]);
        if prob_in < threshold || prob_out < threshold {
            continue;
        }
        let posterior = match corr.trait_triplet(i, t, j, nu) {
            Ok(tc) if tc.determinant() > MIN_DETERMINANT => {
                Some(posterior_over_models(&compute_log_bayes_factors(&tc), prior).get(CHAIN))
            }
            Ok(_) | Err(TripletError::NotPositiveDefinite(_)) | Err(TripletError::CorrelationOutOfRange { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let verdict = match posterior {
            Some(p) if p > threshold => Verdict::Mediated,
            _ => Verdict::Undetermined,
        };
        out.push(MediatorCandidate { mediator: t, prob_in, prob_out, posterior, verdict });
    }
    Ok(out)
}

/// Posterior of the chain for one explicit marker/trait triplet.
pub fn triplet_chain_posterior(t: &TripletCorrelation, prior: &PriorWeights) -> f64 {
    posterior_over_models(&compute_log_bayes_factors(t), prior).get(CHAIN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posterior::posterior_upper_bound;
    use ndarray::array;

    fn dmag_bk() -> PriorWeights {
        PriorWeights::from_unnormalized([3.0, 2.0, 0.0, 2.0, 1.0, 1.0, 1.0, 3.0, 1.0, 1.0, 1.0]).unwrap()
    }

    /// One marker, three traits; marker drives T0, T0 drives T1, T2 unrelated.
    fn chain_corr(a: f64, b: f64, n: u64) -> JointCorrelation {
        let c = array![[1.0, a, a * b, 0.0], [a, 1.0, b, 0.0], [a * b, b, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0],];
        JointCorrelation::from_matrix(c, n, 1).unwrap()
    }

    #[test]
    fn chain_cell_matches_direct_triplet() {
        let corr = chain_corr(0.6, 0.5, 1000);
        let res = full_scan(&corr, &dmag_bk(), &ScanOptions::default()).unwrap();
        let t = TripletCorrelation::new(0.6, 0.3, 0.5, 1000, 4.0).unwrap();
        let direct = triplet_chain_posterior(&t, &dmag_bk());
        assert!((res.prob[(0, 1)] - direct).abs() < 1e-12);
        assert_eq!(res.best_marker[(0, 1)], 0);
        assert!(res.prob[(0, 1)] > res.prob[(1, 0)]);
        assert_eq!(res.prob[(0, 0)], 0.0);
    }

    #[test]
    fn identity_correlation_is_uninformative() {
        let c = Array2::eye(5);
        let corr = JointCorrelation::from_matrix(c, 200, 2).unwrap();
        let res = full_scan(&corr, &dmag_bk(), &ScanOptions::default()).unwrap();
        let at_zero = triplet_chain_posterior(&TripletCorrelation::new(0.0, 0.0, 0.0, 200, 4.0).unwrap(), &dmag_bk());
        assert!(at_zero < 0.05);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.0 } else { at_zero };
                assert!((res.prob[(i, j)] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tied_markers_pick_lowest_index() {
        let c = array![[1.0, 1.0, 0.6, 0.3], [1.0, 1.0, 0.6, 0.3], [0.6, 0.6, 1.0, 0.5], [0.3, 0.3, 0.5, 1.0],];
        let corr = JointCorrelation::from_matrix(c, 500, 2).unwrap();
        for strategy in [ScanStrategy::MaxOverMarkers, ScanStrategy::LocalLinkage] {
            let opts = ScanOptions { strategy, ..Default::default() };
            let res = full_scan(&corr, &dmag_bk(), &opts).unwrap();
            assert_eq!(res.best_marker[(0, 1)], 0);
        }
    }

    #[test]
    fn degenerate_triplets_are_skipped() {
        // marker identical to trait 0
        let c = array![[1.0, 1.0, 0.5], [1.0, 1.0, 0.5], [0.5, 0.5, 1.0]];
        let corr = JointCorrelation::from_matrix(c, 100, 1).unwrap();
        let res = full_scan(&corr, &PriorWeights::uniform(), &ScanOptions::default()).unwrap();
        assert_eq!(res.meta.skipped, 2);
        assert_eq!(res.prob[(0, 1)], 0.0);
        assert_eq!(res.best_marker[(0, 1)], NO_MARKER);
    }

    #[test]
    fn shape_errors() {
        let corr = JointCorrelation::from_matrix(Array2::eye(2), 10, 1).unwrap();
        assert_eq!(full_scan(&corr, &dmag_bk(), &ScanOptions::default()), Err(ScanError::TooFewTraits(1)));
        let corr = JointCorrelation::from_matrix(Array2::eye(3), 10, 0).unwrap();
        assert_eq!(full_scan(&corr, &dmag_bk(), &ScanOptions::default()), Err(ScanError::NoMarkers));
    }

    #[test]
    fn scan_respects_bound() {
        let corr = chain_corr(0.9, 0.9, 50);
        let res = full_scan(&corr, &dmag_bk(), &ScanOptions::default()).unwrap();
        let bound = posterior_upper_bound(50, 4.0, &dmag_bk()).unwrap();
        assert!(res.prob.iter().all(|&p| (0.0..=bound + 1e-12).contains(&p)));
    }

    #[test]
    fn ranking_order() {
        let mut prob = Array2::from_elem((3, 3), 0.25);
        prob.diag_mut().fill(0.0);
        let res = ScanResult {
            prob,
            best_marker: Array2::zeros((3, 3)),
            meta: ScanMeta {
                n: 1,
                nu: 4.0,
                prior_label: String::new(),
                strategy: ScanStrategy::MaxOverMarkers,
                skipped: 0,
            },
        };
        let order: Vec<_> = rank_edges(&res, None).iter().map(|e| (e.regulator, e.target)).collect();
        assert_eq!(order, vec![(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]);
        let mut res = res;
        res.prob[(2, 1)] = 0.9;
        let top = rank_edges(&res, Some(2));
        assert_eq!(top.len(), 2);
        assert_eq!((top[0].regulator, top[0].target), (2, 1));
    }

    fn three_trait_result(prob: Array2<f64>) -> ScanResult {
        let m = prob.nrows();
        ScanResult {
            prob,
            best_marker: Array2::zeros((m, m)),
            meta: ScanMeta {
                n: 1000,
                nu: 4.0,
                prior_label: String::new(),
                strategy: ScanStrategy::MaxOverMarkers,
                skipped: 0,
            },
        }
    }

    #[test]
    fn mediation_on_exact_chain() {
        // traits T0 → T1 → T2, one unrelated marker
        let (a, b) = (0.6, 0.5);
        let c = array![[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, a, a * b], [0.0, a, 1.0, b], [0.0, a * b, b, 1.0],];
        let corr = JointCorrelation::from_matrix(c, 1000, 1).unwrap();
        let prob = array![[0.0, 0.6, 0.6], [0.0, 0.0, 0.6], [0.0, 0.0, 0.0]];
        let res = three_trait_result(prob);
        let prior = dmag_bk();
        let report = mediation_scan(&res, &corr, &prior, 4.0, (0, 2), 0.5).unwrap();
        assert_eq!(report.len(), 1);
        let want = triplet_chain_posterior(&TripletCorrelation::new(a, a * b, b, 1000, 4.0).unwrap(), &prior);
        assert_eq!(report[0].mediator, 1);
        assert!((report[0].posterior.unwrap() - want).abs() < 1e-15);
        assert!(want > 0.5);
        assert_eq!(report[0].verdict, Verdict::Mediated);
    }

    #[test]
    fn mediation_filters() {
        let corr = JointCorrelation::from_matrix(Array2::eye(4), 1000, 1).unwrap();
        let prob = array![[0.0, 0.9, 0.6], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let res = three_trait_result(prob);
        let report = mediation_scan(&res, &corr, &dmag_bk(), 4.0, (0, 2), 0.5).unwrap();
        assert!(report.is_empty());
        assert!(matches!(
            mediation_scan(&res, &corr, &dmag_bk(), 4.0, (1, 2), 0.5),
            Err(ScanError::EdgeBelowThreshold { .. })
        ));
    }
}
