//! Bayesian local causal discovery over variable triplets.
//!
//! Scores all eleven Gaussian covariance structures of a triplet with closed
//! form Bayes factors, turns them into posteriors with graph-counting priors,
//! and scans marker/trait data for chains `L_k → T_i → T_j`.
//!
//! Module map:
//! - [`structure`]: the CI models and their covariance/precision zero patterns.
//! - [`bayes`], [`posterior`]: Bayes factors, posteriors and the posterior bound.
//! - [`graphs`]: three-node DAG/DMAG enumeration and priors over CI models.
//! - [`data`]: delimited-text loading and the joint correlation matrix.
//! - [`scan`]: the triplet scan, edge ranking and mediation checks.
//! - [`sim`]: synthetic data generators with ground truth.
//! - [`eval`]: ROC, precision-recall and calibration.

// `!(x > y)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod data;
pub mod eval;
pub mod graphs;
pub mod posterior;
pub mod scan;
pub mod sim;
pub mod structure;

pub use bayes::{
    compute_log_bayes_factors, log_prefactors, LogBayesFactors, Prefactors, TripletCorrelation, TripletError,
    DEFAULT_NU,
};
pub use posterior::{posterior_over_models, posterior_upper_bound, PosteriorVector, PriorError, PriorWeights};
pub use structure::{classify_zero_pattern, CanonicalCase, CiModel, Classification, ZeroPattern};
