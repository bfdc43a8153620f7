//! Closed-form Bayes factors of the eleven covariance structures against the
//! unconstrained model.
//!
//! With an inverse Wishart prior whose scale shrinks to zero, every Bayes
//! factor depends on the data only through the sample correlation matrix
//! `R` and the sample count `n`:
//!
//! ```text
//! BF(X1 ⊥ X2 ⊥ X3)   = f g |R|^((n+ν)/2)
//! BF(X3 ⊥ (X1, X2))  = f (|R| / (1 - r12²))^((n+ν)/2)
//! BF(X1 ⊥ X2 | X3)   = g (|R| / ((1 - r13²)(1 - r23²)))^((n+ν)/2)
//! BF(X1 ⊥ X2)        = (f / g) (1 - r12²)^((n+ν-1)/2)
//! ```
//!
//! with `f = (n+ν-2)/(ν-2)` and
//! `g = Γ((n+ν)/2) Γ((ν-1)/2) / (Γ((n+ν-1)/2) Γ(ν/2))`; the remaining
//! models follow by permuting variable labels. Everything is kept in
//! natural-log space.

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::structure::CiModel;

/// Default prior degrees of freedom: gives uniform marginals on every
/// off-diagonal correlation of a 3×3 matrix.
pub const DEFAULT_NU: f64 = 4.0;

/// Correlation matrices with determinant at or below this are rejected.
pub const MIN_DETERMINANT: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TripletError {
    #[error("prior degrees of freedom must exceed 2, got {0}")]
    DegreesOfFreedom(f64),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("correlation {name} = {value} is not in (-1, 1)")]
    CorrelationOutOfRange { name: &'static str, value: f64 },
    #[error("correlation matrix is not positive definite (det = {0:e})")]
    NotPositiveDefinite(f64),
}

/// `ln f(n, ν)` and `ln g(n, ν)`, the data-independent prefactors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prefactors {
    pub n: u64,
    pub nu: f64,
    pub log_f: f64,
    pub log_g: f64,
}

impl Prefactors {
    pub fn new(n: u64, nu: f64) -> Result<Prefactors, TripletError> {
        let (log_f, log_g) = log_prefactors(n, nu)?;
        Ok(Prefactors { n, nu, log_f, log_g })
    }

    /// Exponent `(n+ν)/2` applied to determinant ratios.
    pub fn half_dof(&self) -> f64 {
        (self.n as f64 + self.nu) / 2.0
    }

    /// Exponent `(n+ν-1)/2` applied to `1 - r²` in the marginal models.
    pub fn half_dof_marginal(&self) -> f64 {
        (self.n as f64 + self.nu - 1.0) / 2.0
    }
}

/// Natural logs of `f(n, ν) = (n+ν-2)/(ν-2)` and
/// `g(n, ν) = Γ((n+ν)/2) Γ((ν-1)/2) / (Γ((n+ν-1)/2) Γ(ν/2))`.
pub fn log_prefactors(n: u64, nu: f64) -> Result<(f64, f64), TripletError> {
    if !(nu > 2.0) || !nu.is_finite() {
        return Err(TripletError::DegreesOfFreedom(nu));
    }
    if n == 0 {
        return Err(TripletError::NoSamples);
    }
    let n = n as f64;
    let log_f = ((n + nu - 2.0) / (nu - 2.0)).ln();
    let log_g =
        ln_gamma((n + nu) / 2.0) - ln_gamma((n + nu - 1.0) / 2.0) + ln_gamma((nu - 1.0) / 2.0) - ln_gamma(nu / 2.0);
    Ok((log_f, log_g))
}

/// Sufficient statistic for one triplet: the three pairwise correlations,
/// the sample count and the prior degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletCorrelation {
    r12: f64,
    r13: f64,
    r23: f64,
    n: u64,
    nu: f64,
}

impl TripletCorrelation {
    pub fn new(r12: f64, r13: f64, r23: f64, n: u64, nu: f64) -> Result<Self, TripletError> {
        if !(nu > 2.0) || !nu.is_finite() {
            return Err(TripletError::DegreesOfFreedom(nu));
        }
        if n == 0 {
            return Err(TripletError::NoSamples);
        }
        for (name, value) in [("r12", r12), ("r13", r13), ("r23", r23)] {
            if !(value.abs() < 1.0) {
                return Err(TripletError::CorrelationOutOfRange { name, value });
            }
        }
        let det = correlation_determinant(r12, r13, r23);
        if !(det > MIN_DETERMINANT) {
            return Err(TripletError::NotPositiveDefinite(det));
        }
        Ok(TripletCorrelation { r12, r13, r23, n, nu })
    }

    pub fn r12(&self) -> f64 {
        self.r12
    }
    pub fn r13(&self) -> f64 {
        self.r13
    }
    pub fn r23(&self) -> f64 {
        self.r23
    }
    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Correlation between variables `a` and `b` (0-based).
    pub fn get(&self, a: usize, b: usize) -> f64 {
        match (a.min(b), a.max(b)) {
            (x, y) if x == y => 1.0,
            (0, 1) => self.r12,
            (0, 2) => self.r13,
            (1, 2) => self.r23,
            _ => panic!("variable index out of range"),
        }
    }

    pub fn determinant(&self) -> f64 {
        correlation_determinant(self.r12, self.r13, self.r23)
    }

    /// Relabel variables so that new variable `a` is old variable `perm[a]`.
    pub fn permuted(&self, perm: [usize; 3]) -> TripletCorrelation {
        TripletCorrelation {
            r12: self.get(perm[0], perm[1]),
            r13: self.get(perm[0], perm[2]),
            r23: self.get(perm[1], perm[2]),
            ..*self
        }
    }
}

/// `|R| = 1 + 2 r12 r13 r23 - r12² - r13² - r23²`.
///
/// The entries are sorted first so every relabeling of the variables rounds
/// identically; near-singular triplets would otherwise amplify the order
/// dependence through the `(n+ν)/2` exponent.
pub fn correlation_determinant(r12: f64, r13: f64, r23: f64) -> f64 {
    let mut r = [r12, r13, r23];
    r.sort_unstable_by(f64::total_cmp);
    let squares = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    1.0 + 2.0 * (r[0] * r[1] * r[2]) - squares
}

/// Log Bayes factor of each CI model against [`CiModel::FULL`]; entry 0 is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBayesFactors(pub [f64; CiModel::COUNT]);

impl LogBayesFactors {
    pub fn get(&self, model: CiModel) -> f64 {
        self.0[model.index()]
    }

    pub fn as_array(&self) -> &[f64; CiModel::COUNT] {
        &self.0
    }
}

pub fn compute_log_bayes_factors(t: &TripletCorrelation) -> LogBayesFactors {
    let pre = Prefactors::new(t.n, t.nu).expect("validated at construction");
    log_bayes_factors_with(&pre, t.r12, t.r13, t.r23)
}

/// Log Bayes factors for correlations that are assumed valid, reusing
/// precomputed prefactors.
pub fn log_bayes_factors_with(pre: &Prefactors, r12: f64, r13: f64, r23: f64) -> LogBayesFactors {
    let terms = TripletTerms::new(r12, r13, r23);
    log_bayes_factors_from_terms(pre, &terms)
}

/// The logarithmic building blocks shared by all eleven Bayes factors.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TripletTerms {
    /// ln(1 - r²) for pairs 12, 23, 13
    pub l12: f64,
    pub l23: f64,
    pub l13: f64,
    /// ln |R|
    pub ldet: f64,
}

impl TripletTerms {
    pub fn new(r12: f64, r13: f64, r23: f64) -> TripletTerms {
        TripletTerms {
            l12: (-r12 * r12).ln_1p(),
            l23: (-r23 * r23).ln_1p(),
            l13: (-r13 * r13).ln_1p(),
            ldet: correlation_determinant(r12, r13, r23).ln(),
        }
    }
}

pub(crate) fn log_bayes_factors_from_terms(pre: &Prefactors, t: &TripletTerms) -> LogBayesFactors {
    let h = pre.half_dof();
    let h1 = pre.half_dof_marginal();
    let (lf, lg) = (pre.log_f, pre.log_g);
    LogBayesFactors([
        0.0,
        lf - lg + h1 * t.l12,
        lf - lg + h1 * t.l23,
        lf - lg + h1 * t.l13,
        // pairwise sums are commutative, so relabeling cannot change rounding
        lg + h * (t.ldet - (t.l13 + t.l23)),
        lg + h * (t.ldet - (t.l12 + t.l13)),
        lg + h * (t.ldet - (t.l12 + t.l23)),
        lf + h * (t.ldet - t.l23),
        lf + h * (t.ldet - t.l13),
        lf + h * (t.ldet - t.l12),
        lf + lg + h * t.ldet,
    ])
}
