//! Scoring predicted edge probabilities against known structure.

use ndarray::Array2;
use serde::Serialize;
use thiserror::Error;

use crate::scan::ScanResult;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no scores to evaluate")]
    Empty,
    #[error("{scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("score {value} at position {index} is not a probability")]
    BadScore { index: usize, value: f64 },
    #[error("all labels are {0}; need both classes")]
    OneClass(bool),
    #[error("no positive labels")]
    NoPositives,
    #[error("calibration needs at least one bin")]
    NoBins,
    #[error("{pairs} pairs cannot fill {bins} bins")]
    TooFewPairs { pairs: usize, bins: usize },
    #[error("truth matrix is {got}x{got2}, scan has {want} traits")]
    TruthShape { got: usize, got2: usize, want: usize },
}

/// Probability scores with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScores {
    scores: Vec<f64>,
    labels: Vec<bool>,
}

impl LabeledScores {
    pub fn new(scores: Vec<f64>, labels: Vec<bool>) -> Result<Self, EvalError> {
        if scores.len() != labels.len() {
            return Err(EvalError::LengthMismatch { scores: scores.len(), labels: labels.len() });
        }
        if scores.is_empty() {
            return Err(EvalError::Empty);
        }
        if let Some((index, &value)) = scores.iter().enumerate().find(|(_, &s)| !(0.0..=1.0).contains(&s)) {
            return Err(EvalError::BadScore { index, value });
        }
        Ok(LabeledScores { scores, labels })
    }

    /// One entry per ordered pair `(i, j)`, `i ≠ j`, in row-major order.
    pub fn from_scan(res: &ScanResult, truth: &Array2<bool>) -> Result<Self, EvalError> {
        let m = res.n_traits();
        if truth.dim() != (m, m) {
            return Err(EvalError::TruthShape { got: truth.nrows(), got2: truth.ncols(), want: m });
        }
        let pairs = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)));
        let (scores, labels) = pairs.map(|p| (res.prob[p], truth[p])).unzip();
        Self::new(scores, labels)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    /// Tied-score groups in decreasing score order, as (score, positives, negatives).
    fn groups_descending(&self) -> Vec<(f64, usize, usize)> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]));
        let mut out: Vec<(f64, usize, usize)> = Vec::new();
        for i in idx {
            let s = self.scores[i];
            match out.last_mut() {
                Some(g) if g.0 == s => {}
                _ => out.push((s, 0, 0)),
            }
            let g = out.last_mut().unwrap();
            if self.labels[i] {
                g.1 += 1;
            } else {
                g.2 += 1;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Predict positive when the score is at least this value.
    pub threshold: f64,
    pub x: f64,
    pub y: f64,
}

/// A curve and the area under it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub auc: f64,
}

/// ROC curve as (FPR, TPR) at every distinct threshold, starting from (0, 0).
/// The area is the Mann–Whitney statistic with ties counted half.
pub fn roc_auc(s: &LabeledScores) -> Result<Curve, EvalError> {
    let pos = s.positives();
    let neg = s.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(EvalError::OneClass(pos > 0));
    }
    let (p, n) = (pos as f64, neg as f64);
    let mut points = vec![CurvePoint { threshold: f64::INFINITY, x: 0.0, y: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    // negatives ranked strictly below, accumulated from the top
    let mut wins = 0.0;
    for (score, gp, gn) in s.groups_descending() {
        wins += gp as f64 * (neg - fp - gn) as f64 + 0.5 * gp as f64 * gn as f64;
        tp += gp;
        fp += gn;
        points.push(CurvePoint { threshold: score, x: fp as f64 / n, y: tp as f64 / p });
    }
    Ok(Curve { points, auc: wins / (p * n) })
}

/// Precision-recall as (recall, precision) at every distinct threshold; the
/// area is step-wise average precision `Σ (R_k - R_{k-1}) P_k`.
pub fn pr_auc(s: &LabeledScores) -> Result<Curve, EvalError> {
    let pos = s.positives();
    if pos == 0 {
        return Err(EvalError::NoPositives);
    }
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut last_recall = 0.0;
    for (score, gp, gn) in s.groups_descending() {
        tp += gp;
        fp += gn;
        let recall = tp as f64 / pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        auc += (recall - last_recall) * precision;
        last_recall = recall;
        points.push(CurvePoint { threshold: score, x: recall, y: precision });
    }
    Ok(Curve { points, auc })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Binning {
    /// Sorted scores split into bins of (nearly) equal size.
    #[default]
    EqualCount,
    /// Bins of width `1 / bins` on [0, 1]; empty bins are omitted.
    EqualWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationBin {
    /// Mean predicted score in the bin.
    pub mean_score: f64,
    /// Fraction of positive labels in the bin.
    pub observed: f64,
    pub count: usize,
}

/// Calibration table. Under equal-count binning the first `len % bins` bins
/// take one extra pair, and pairs with tied scores count as the tie group's
/// positive rate so that arbitrary order within a tie cannot move labels
/// between bins.
pub fn calibration_table(s: &LabeledScores, bins: usize, binning: Binning) -> Result<Vec<CalibrationBin>, EvalError> {
    if bins == 0 {
        return Err(EvalError::NoBins);
    }
    match binning {
        Binning::EqualCount if s.len() < bins => Err(EvalError::TooFewPairs { pairs: s.len(), bins }),
        Binning::EqualCount => Ok(equal_count(s, bins)),
        Binning::EqualWidth => Ok(equal_width(s, bins)),
    }
}

fn equal_count(s: &LabeledScores, bins: usize) -> Vec<CalibrationBin> {
    let mut sorted: Vec<(f64, f64)> = Vec::with_capacity(s.len());
    for (score, gp, gn) in s.groups_descending().into_iter().rev() {
        let rate = gp as f64 / (gp + gn) as f64;
        sorted.extend(std::iter::repeat_n((score, rate), gp + gn));
    }
    let (base, extra) = (s.len() / bins, s.len() % bins);
    let mut out = Vec::with_capacity(bins);
    let mut start = 0;
    for b in 0..bins {
        let size = base + usize::from(b < extra);
        let chunk = &sorted[start..start + size];
        start += size;
        let k = size as f64;
        out.push(CalibrationBin {
            mean_score: chunk.iter().map(|c| c.0).sum::<f64>() / k,
            observed: chunk.iter().map(|c| c.1).sum::<f64>() / k,
            count: size,
        });
    }
    out
}

fn equal_width(s: &LabeledScores, bins: usize) -> Vec<CalibrationBin> {
    let mut sums = vec![(0.0, 0usize, 0usize); bins];
    for (&score, &label) in s.scores.iter().zip(&s.labels) {
        let b = ((score * bins as f64) as usize).min(bins - 1);
        sums[b].0 += score;
        sums[b].1 += usize::from(label);
        sums[b].2 += 1;
    }
    sums.into_iter()
        .filter(|&(_, _, c)| c > 0)
        .map(|(total, pos, count)| CalibrationBin {
            mean_score: total / count as f64,
            observed: pos as f64 / count as f64,
            count,
        })
        .collect()
}
