//! The eleven conditional independence models over three Gaussian variables.
//!
//! A model is identified by which off-diagonal entries of the covariance
//! matrix (marginal independences) and of the precision matrix (conditional
//! independences given the third variable) are zero. Pairs are indexed as
//! `0 = {X1, X2}`, `1 = {X2, X3}`, `2 = {X3, X1}`, which lines up with the
//! model numbering: model `1 + p` is a marginal independence on pair `p`,
//! model `4 + p` a conditional independence on pair `p`.

use std::fmt;

use nalgebra::Matrix3;
use serde::Serialize;
use thiserror::Error;

/// Node pairs in pair-index order.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

/// Pair index of the unordered pair `{a, b}`.
pub fn pair_index(a: usize, b: usize) -> usize {
    match (a.min(b), a.max(b)) {
        (0, 1) => 0,
        (1, 2) => 1,
        (0, 2) => 2,
        _ => panic!("invalid node pair ({a}, {b})"),
    }
}

/// The five canonical cases; each CI model is a relabeling of one of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CanonicalCase {
    Full,
    Acausal,
    Causal,
    Independent,
    Empty,
}

impl fmt::Display for CanonicalCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CanonicalCase::Full => "full",
            CanonicalCase::Acausal => "acausal",
            CanonicalCase::Causal => "causal",
            CanonicalCase::Independent => "independent",
            CanonicalCase::Empty => "empty",
        };
        f.write_str(s)
    }
}

/// Conditional independence model, numbered 0..=10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CiModel(u8);

impl CiModel {
    pub const COUNT: usize = 11;

    /// X1, X2, X3 mutually dependent (the reference model).
    pub const FULL: CiModel = CiModel(0);
    /// X1 ⊥ X2
    pub const INDEP_12: CiModel = CiModel(1);
    /// X2 ⊥ X3
    pub const INDEP_23: CiModel = CiModel(2);
    /// X3 ⊥ X1
    pub const INDEP_31: CiModel = CiModel(3);
    /// X1 ⊥ X2 | X3
    pub const INDEP_12_GIVEN_3: CiModel = CiModel(4);
    /// X2 ⊥ X3 | X1
    pub const INDEP_23_GIVEN_1: CiModel = CiModel(5);
    /// X3 ⊥ X1 | X2, the model matching the chain X1 → X2 → X3.
    pub const INDEP_31_GIVEN_2: CiModel = CiModel(6);
    /// X1 ⊥ (X2, X3)
    pub const INDEP_1_REST: CiModel = CiModel(7);
    /// X2 ⊥ (X3, X1)
    pub const INDEP_2_REST: CiModel = CiModel(8);
    /// X3 ⊥ (X1, X2)
    pub const INDEP_3_REST: CiModel = CiModel(9);
    /// X1 ⊥ X2 ⊥ X3
    pub const EMPTY: CiModel = CiModel(10);

    pub fn new(index: usize) -> Option<CiModel> {
        (index < Self::COUNT).then_some(CiModel(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = CiModel> {
        (0..Self::COUNT as u8).map(CiModel)
    }

    pub fn case(self) -> CanonicalCase {
        match self.0 {
            0 => CanonicalCase::Full,
            1..=3 => CanonicalCase::Acausal,
            4..=6 => CanonicalCase::Causal,
            7..=9 => CanonicalCase::Independent,
            _ => CanonicalCase::Empty,
        }
    }

    pub fn statement(self) -> &'static str {
        [
            "X1 !_|_ X2 !_|_ X3",
            "X1 _|_ X2",
            "X2 _|_ X3",
            "X3 _|_ X1",
            "X1 _|_ X2 | X3",
            "X2 _|_ X3 | X1",
            "X3 _|_ X1 | X2",
            "X1 _|_ (X2, X3)",
            "X2 _|_ (X3, X1)",
            "X3 _|_ (X1, X2)",
            "X1 _|_ X2 _|_ X3",
        ][self.index()]
    }

    /// Zero pattern implied by the model.
    pub fn zero_pattern(self) -> ZeroPattern {
        let mut cov = [false; 3];
        let mut prec = [false; 3];
        match self.0 {
            0 => {}
            1..=3 => cov[self.index() - 1] = true,
            4..=6 => prec[self.index() - 4] = true,
            7..=9 => {
                let node = self.index() - 7;
                for (p, &(a, b)) in PAIRS.iter().enumerate() {
                    if a == node || b == node {
                        cov[p] = true;
                        prec[p] = true;
                    }
                }
            }
            _ => {
                cov = [true; 3];
                prec = [true; 3];
            }
        }
        ZeroPattern { cov, prec }
    }

    /// Model obtained after relabeling variables: new variable `a` is old
    /// variable `perm[a]`.
    pub fn relabel(self, perm: [usize; 3]) -> CiModel {
        self.zero_pattern().relabel(perm).model().expect("relabeling preserves consistency")
    }
}

impl fmt::Display for CiModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.0)
    }
}

/// Which off-diagonal entries are zero, in covariance and precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ZeroPattern {
    pub cov: [bool; 3],
    pub prec: [bool; 3],
}

impl ZeroPattern {
    /// Decode from six bits: bits 0..3 covariance pairs, bits 3..6 precision pairs.
    pub fn from_bits(bits: u8) -> ZeroPattern {
        let mut p = ZeroPattern::default();
        for i in 0..3 {
            p.cov[i] = bits & (1 << i) != 0;
            p.prec[i] = bits & (1 << (i + 3)) != 0;
        }
        p
    }

    pub fn bits(&self) -> u8 {
        let mut b = 0u8;
        for i in 0..3 {
            b |= (self.cov[i] as u8) << i;
            b |= (self.prec[i] as u8) << (i + 3);
        }
        b
    }

    fn cov_zero(&self, a: usize, b: usize) -> bool {
        self.cov[pair_index(a, b)]
    }

    fn prec_zero(&self, a: usize, b: usize) -> bool {
        self.prec[pair_index(a, b)]
    }

    /// Checks the four implications that hold between zeros of a positive
    /// definite covariance matrix and zeros of its inverse.
    pub fn is_consistent(&self) -> bool {
        for (i, j, k) in ordered_triples() {
            // precision zeros on (i,k) and (j,k) force covariance zeros there
            if self.prec_zero(i, k) && self.prec_zero(j, k) && !(self.cov_zero(i, k) && self.cov_zero(j, k)) {
                return false;
            }
            // and vice versa
            if self.cov_zero(i, k) && self.cov_zero(j, k) && !(self.prec_zero(i, k) && self.prec_zero(j, k)) {
                return false;
            }
            // a pair zero in both matrices drags a further zero into each
            if self.cov_zero(i, j)
                && self.prec_zero(i, j)
                && !((self.prec_zero(i, k) || self.prec_zero(j, k)) && (self.cov_zero(i, k) || self.cov_zero(j, k)))
            {
                return false;
            }
            if self.cov_zero(i, k) && self.prec_zero(j, k) && !(self.prec_zero(i, k) && self.cov_zero(j, k)) {
                return false;
            }
        }
        true
    }

    /// The CI model with exactly this pattern, if any.
    pub fn model(&self) -> Option<CiModel> {
        CiModel::all().find(|m| m.zero_pattern() == *self)
    }

    pub fn relabel(&self, perm: [usize; 3]) -> ZeroPattern {
        let mut out = ZeroPattern::default();
        for (p, &(a, b)) in PAIRS.iter().enumerate() {
            let old = pair_index(perm[a], perm[b]);
            out.cov[p] = self.cov[old];
            out.prec[p] = self.prec[old];
        }
        out
    }
}

fn ordered_triples() -> impl Iterator<Item = (usize, usize, usize)> {
    (0..3).flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j, 3 - i - j)))
}

/// All six permutations of three labels.
pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("covariance matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("zero tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// Outcome of reading the zero pattern off a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Model(CiModel),
    /// The detected pattern violates the covariance/precision implications,
    /// which for a truly PD matrix means `tol` is too coarse.
    Inconsistent(ZeroPattern),
}

pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Classify a 3×3 covariance matrix by the zeros of its correlation and
/// partial-correlation matrices (entries with magnitude below `tol`).
pub fn classify_zero_pattern(cov: &Matrix3<f64>, tol: f64) -> Result<Classification, ClassifyError> {
    if !(tol > 0.0) {
        return Err(ClassifyError::BadTolerance(tol));
    }
    if (cov - cov.transpose()).abs().max() > 1e-12 * cov.abs().max() {
        return Err(ClassifyError::NotPositiveDefinite);
    }
    let chol = cov.cholesky().ok_or(ClassifyError::NotPositiveDefinite)?;
    let prec = chol.inverse();

    let mut pattern = ZeroPattern::default();
    for (p, &(a, b)) in PAIRS.iter().enumerate() {
        let corr = cov[(a, b)] / (cov[(a, a)] * cov[(b, b)]).sqrt();
        let partial = -prec[(a, b)] / (prec[(a, a)] * prec[(b, b)]).sqrt();
        pattern.cov[p] = corr.abs() < tol;
        pattern.prec[p] = partial.abs() < tol;
    }
    Ok(match pattern.model() {
        Some(m) if pattern.is_consistent() => Classification::Model(m),
        _ => Classification::Inconsistent(pattern),
    })
}
