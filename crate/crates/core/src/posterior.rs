//! Priors over CI models and the resulting posteriors.

use thiserror::Error;

use crate::bayes::{log_prefactors, LogBayesFactors, TripletError};
use crate::structure::CiModel;

const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PriorError {
    #[error("prior weight for {model} is {value}, expected a finite nonnegative number")]
    BadWeight { model: CiModel, value: f64 },
    #[error("prior weights sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("prior weights are all zero")]
    AllZero,
}

/// Prior probability of each CI model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorWeights([f64; CiModel::COUNT]);

impl PriorWeights {
    /// Weights that already sum to one (within 1e-12).
    pub fn new(w: [f64; CiModel::COUNT]) -> Result<Self, PriorError> {
        check_weights(&w)?;
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(PriorError::NotNormalized(sum));
        }
        Ok(PriorWeights(w))
    }

    /// Normalize nonnegative weights, e.g. graph counts.
    pub fn from_unnormalized(w: [f64; CiModel::COUNT]) -> Result<Self, PriorError> {
        check_weights(&w)?;
        let sum: f64 = w.iter().sum();
        if sum <= 0.0 {
            return Err(PriorError::AllZero);
        }
        Ok(PriorWeights(w.map(|x| x / sum)))
    }

    pub fn uniform() -> Self {
        PriorWeights([1.0 / CiModel::COUNT as f64; CiModel::COUNT])
    }

    /// All mass on a single model.
    pub fn point(model: CiModel) -> Self {
        let mut w = [0.0; CiModel::COUNT];
        w[model.index()] = 1.0;
        PriorWeights(w)
    }

    pub fn get(&self, model: CiModel) -> f64 {
        self.0[model.index()]
    }

    pub fn as_array(&self) -> &[f64; CiModel::COUNT] {
        &self.0
    }

    /// `ln w`, with `-inf` for zero weights.
    pub fn log_weights(&self) -> [f64; CiModel::COUNT] {
        self.0.map(f64::ln)
    }
}

fn check_weights(w: &[f64; CiModel::COUNT]) -> Result<(), PriorError> {
    for (model, &value) in CiModel::all().zip(w) {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(PriorError::BadWeight { model, value });
        }
    }
    Ok(())
}

/// Posterior probability of each CI model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorVector(pub [f64; CiModel::COUNT]);

impl PosteriorVector {
    pub fn get(&self, model: CiModel) -> f64 {
        self.0[model.index()]
    }

    pub fn as_array(&self) -> &[f64; CiModel::COUNT] {
        &self.0
    }

    /// Most probable model; ties go to the lower index.
    pub fn map_model(&self) -> CiModel {
        let mut best = 0;
        for j in 1..CiModel::COUNT {
            if self.0[j] > self.0[best] {
                best = j;
            }
        }
        CiModel::new(best).unwrap()
    }
}

/// `ln Σ exp(x)`; `-inf` for an empty slice or all `-inf` entries.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// `p(M_j | D) = BF_j p(M_j) / Σ_i BF_i p(M_i)`, normalized in log space.
pub fn posterior_over_models(bf: &LogBayesFactors, prior: &PriorWeights) -> PosteriorVector {
    let lw = prior.log_weights();
    let mut terms = [0.0; CiModel::COUNT];
    for j in 0..CiModel::COUNT {
        terms[j] = bf.0[j] + lw[j];
    }
    let norm = log_sum_exp(&terms);
    PosteriorVector(terms.map(|t| (t - norm).exp()))
}

/// `ln p(model | D)`; `-inf` when the model has zero prior weight.
pub fn log_posterior_of(bf: &LogBayesFactors, prior: &PriorWeights, model: CiModel) -> f64 {
    let lw = prior.log_weights();
    let mut terms = [0.0; CiModel::COUNT];
    for j in 0..CiModel::COUNT {
        terms[j] = bf.0[j] + lw[j];
    }
    terms[model.index()] - log_sum_exp(&terms)
}

/// Largest value `p(X3 ⊥ X1 | X2 | D)` can take at this sample size and prior:
/// `g p(M6) / (g p(M6) + p(M0))`.
pub fn posterior_upper_bound(n: u64, nu: f64, prior: &PriorWeights) -> Result<f64, TripletError> {
    let (_, log_g) = log_prefactors(n, nu)?;
    let p6 = prior.get(CiModel::INDEP_31_GIVEN_2);
    let p0 = prior.get(CiModel::FULL);
    if p6 == 0.0 {
        return Ok(0.0);
    }
    // 1 / (1 + p0 / (g p6)) without forming g itself
    let log_ratio = p0.ln() - log_g - p6.ln();
    Ok(1.0 / (1.0 + log_ratio.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{compute_log_bayes_factors, TripletCorrelation};

    fn dmag_bk() -> PriorWeights {
        // per-class DMAG counts with the first variable as root
        PriorWeights::from_unnormalized([3.0, 2.0, 0.0, 2.0, 1.0, 1.0, 1.0, 3.0, 1.0, 1.0, 1.0]).unwrap()
    }

    fn dag_bk() -> PriorWeights {
        PriorWeights::from_unnormalized([2.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn equal_factors_uniform_prior() {
        let p = posterior_over_models(&LogBayesFactors([3.5; 11]), &PriorWeights::uniform());
        for x in p.0 {
            assert!((x - 1.0 / 11.0).abs() < 1e-15);
        }
    }

    #[test]
    fn point_prior_wins_regardless() {
        let t = TripletCorrelation::new(0.0, 0.0, 0.0, 5000, 4.0).unwrap();
        let p = posterior_over_models(&compute_log_bayes_factors(&t), &PriorWeights::point(CiModel::INDEP_31_GIVEN_2));
        assert_eq!(p.get(CiModel::INDEP_31_GIVEN_2), 1.0);
        assert_eq!(p.0.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn zero_prior_means_zero_posterior() {
        let t = TripletCorrelation::new(0.2, -0.1, 0.3, 50, 4.0).unwrap();
        let p = posterior_over_models(&compute_log_bayes_factors(&t), &dmag_bk());
        assert_eq!(p.get(CiModel::INDEP_23), 0.0);
        assert!((p.0.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn huge_factors_do_not_overflow() {
        let t = TripletCorrelation::new(0.0, 0.0, 0.0, 10_000_000, 4.0).unwrap();
        let p = posterior_over_models(&compute_log_bayes_factors(&t), &dmag_bk());
        assert!(p.0.iter().all(|x| x.is_finite()));
        assert!(p.get(CiModel::EMPTY) > 0.99);
    }

    #[test]
    fn bounds_at_112_samples() {
        let b = posterior_upper_bound(112, 4.0, &dmag_bk()).unwrap();
        assert!((b - 0.6909).abs() < 5e-4, "{b}");
        let b = posterior_upper_bound(112, 4.0, &dag_bk()).unwrap();
        assert!((b - 0.7703).abs() < 5e-4, "{b}");
    }

    #[test]
    fn bound_is_zero_without_m6_mass() {
        assert_eq!(posterior_upper_bound(112, 4.0, &PriorWeights::point(CiModel::FULL)).unwrap(), 0.0);
        assert_eq!(posterior_upper_bound(112, 4.0, &PriorWeights::point(CiModel::INDEP_31_GIVEN_2)).unwrap(), 1.0);
    }

    #[test]
    fn prior_validation() {
        let mut w = [0.0; 11];
        w[0] = 0.5;
        assert!(matches!(PriorWeights::new(w), Err(PriorError::NotNormalized(_))));
        w[1] = -0.5;
        assert!(matches!(PriorWeights::new(w), Err(PriorError::BadWeight { .. })));
        assert_eq!(PriorWeights::from_unnormalized([0.0; 11]), Err(PriorError::AllZero));
    }

    #[test]
    fn log_sum_exp_edge_cases() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
