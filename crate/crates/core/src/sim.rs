//! Synthetic data with known structure.
//!
//! Two families: three-variable linear SEMs (`X1 → X2`, optionally
//! `X1 → X3`, `X2 → X3`) and random gene networks
//! `t = B t + A l + ε` with binary markers `l`. All randomness comes from
//! ChaCha8 seeded with a `u64`, so outputs reproduce across platforms.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, StandardNormal, Uniform};
use serde::Serialize;
use thiserror::Error;

/// Name of the random number generator, for provenance records.
pub const GENERATOR: &str = "ChaCha8";

/// Stream ids keep network structure and sampled data independent under
/// a shared seed.
const STREAM_NETWORK: u64 = 0;
const STREAM_DATA: u64 = 1;

const BERNOULLI_P_RANGE: (f64, f64) = (0.1, 0.5);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("Bernoulli success probability {0} is outside [0.1, 0.5]")]
    BernoulliP(f64),
    #[error("edge probability {0} is outside [0, 1]")]
    EdgeProbability(f64),
    #[error("expected edge count {target} is outside [0, {max}]")]
    EdgeCount { target: f64, max: usize },
    #[error("marker link probability {0} is outside [0, 1]")]
    LinkProbability(f64),
    #[error("coefficient range ({0}, {1}) is empty")]
    CoefficientRange(f64, f64),
    #[error("matrix shapes do not match: {0}")]
    Shape(String),
    #[error("trait graph has a directed cycle")]
    Cyclic,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn nonzero_uniform<R: Rng>(rng: &mut R, dist: &Uniform<f64>) -> f64 {
    loop {
        let v = dist.sample(rng);
        if v != 0.0 {
            return v;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TripletModel {
    /// `X1 → X2 → X3`, `b31 = 0`.
    Causal,
    /// `X2 ← X1 → X3`, `b32 = 0`.
    Independent,
    /// All three coefficients nonzero.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Noise {
    Gaussian,
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripletSemSpec {
    pub model: TripletModel,
    /// Distribution of `X1`.
    pub noise1: Noise,
    /// Success probability for Bernoulli `X1`; drawn from U(0.1, 0.5) when unset.
    pub bernoulli_p: Option<f64>,
    pub seed: u64,
}

/// Parameters actually used for one draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripletSemParams {
    pub b21: f64,
    pub b31: f64,
    pub b32: f64,
    pub bernoulli_p: Option<f64>,
}

/// `n` samples of `(X1, X2, X3)` with `X1 := ε1`, `X2 := b21 X1 + ε2`,
/// `X3 := b31 X1 + b32 X2 + ε3`; free coefficients are standard normal.
pub fn gen_triplet_data(spec: &TripletSemSpec, n: usize) -> Result<(Array2<f64>, TripletSemParams), SimError> {
    if let Some(p) = spec.bernoulli_p {
        if !(BERNOULLI_P_RANGE.0..=BERNOULLI_P_RANGE.1).contains(&p) {
            return Err(SimError::BernoulliP(p));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut coef = || -> f64 { rng.sample(StandardNormal) };
    let b21 = coef();
    let b31 = if spec.model == TripletModel::Causal { 0.0 } else { coef() };
    let b32 = if spec.model == TripletModel::Independent { 0.0 } else { coef() };
    let bernoulli_p = match spec.noise1 {
        Noise::Gaussian => None,
        Noise::Bernoulli => {
            Some(spec.bernoulli_p.unwrap_or_else(|| rng.random_range(BERNOULLI_P_RANGE.0..BERNOULLI_P_RANGE.1)))
        }
    };
    let first = bernoulli_p.map(|p| Bernoulli::new(p).expect("p checked above"));
    let mut x = Array2::zeros((n, 3));
    for mut row in x.rows_mut() {
        let x1 = match &first {
            Some(b) => f64::from(u8::from(b.sample(&mut rng))),
            None => rng.sample(StandardNormal),
        };
        let x2 = b21 * x1 + rng.sample::<f64, _>(StandardNormal);
        let x3 = b31 * x1 + b32 * x2 + rng.sample::<f64, _>(StandardNormal);
        row[0] = x1;
        row[1] = x2;
        row[2] = x3;
    }
    Ok((x, TripletSemParams { b21, b31, b32, bernoulli_p }))
}

/// How many trait-to-trait edges a random network gets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EdgeDensity {
    /// Each admissible edge is included independently so that the expected
    /// edge count equals this value.
    ExpectedEdges(f64),
    /// Independent inclusion probability per admissible edge.
    Probability(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrnSpec {
    /// Number of traits.
    pub m: usize,
    /// Number of markers.
    pub l: usize,
    pub marker_link_prob: f64,
    pub density: EdgeDensity,
    pub coefficient_range: (f64, f64),
    pub seed: u64,
}

impl GrnSpec {
    pub fn new(m: usize, l: usize, density: EdgeDensity, seed: u64) -> Self {
        GrnSpec { m, l, marker_link_prob: 0.05, density, coefficient_range: (-1.0, 1.0), seed }
    }

    /// 100 traits, 100 markers, 54 expected edges.
    pub fn sparse(seed: u64) -> Self {
        Self::new(100, 100, EdgeDensity::ExpectedEdges(54.0), seed)
    }

    /// 100 traits, 100 markers, 247 expected edges.
    pub fn dense(seed: u64) -> Self {
        Self::new(100, 100, EdgeDensity::ExpectedEdges(247.0), seed)
    }

    pub fn preset(name: &str, seed: u64) -> Option<Self> {
        match name {
            "sparse" => Some(Self::sparse(seed)),
            "dense" => Some(Self::dense(seed)),
            _ => None,
        }
    }

    fn edge_probability(&self) -> Result<f64, SimError> {
        let max = self.m * self.m.saturating_sub(1) / 2;
        match self.density {
            EdgeDensity::Probability(p) if (0.0..=1.0).contains(&p) => Ok(p),
            EdgeDensity::Probability(p) => Err(SimError::EdgeProbability(p)),
            EdgeDensity::ExpectedEdges(0.0) => Ok(0.0),
            EdgeDensity::ExpectedEdges(t) if t > 0.0 && t <= max as f64 => Ok(t / max as f64),
            EdgeDensity::ExpectedEdges(target) => Err(SimError::EdgeCount { target, max }),
        }
    }
}

/// Direct and ancestral trait-to-trait relations; `[(i, j)]` means `T_i → T_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub direct: Array2<bool>,
    pub ancestral: Array2<bool>,
}

impl GroundTruth {
    pub fn from_direct(direct: Array2<bool>) -> Self {
        let ancestral = transitive_closure(&direct);
        GroundTruth { direct, ancestral }
    }

    pub fn edge_count(&self) -> usize {
        self.direct.iter().filter(|&&e| e).count()
    }
}

/// Reachability by paths of length ≥ 1, with the diagonal cleared.
pub fn transitive_closure(direct: &Array2<bool>) -> Array2<bool> {
    let m = direct.nrows();
    assert_eq!(direct.ncols(), m, "adjacency matrix must be square");
    let mut r = direct.clone();
    for k in 0..m {
        for i in 0..m {
            if r[(i, k)] {
                for j in 0..m {
                    if r[(k, j)] {
                        r[(i, j)] = true;
                    }
                }
            }
        }
    }
    r.diag_mut().fill(false);
    r
}

/// A linear network `t = B t + A l + ε` over `m` traits and `l` markers.
#[derive(Debug, Clone, PartialEq)]
pub struct GrnNetwork {
    /// `m × l`; `a[(i, k)]` is the effect of marker `k` on trait `i`.
    pub a: Array2<f64>,
    /// `m × m`; `b[(j, i)]` is the effect of trait `i` on trait `j`.
    pub b: Array2<f64>,
    /// Topological order of the traits.
    pub order: Vec<usize>,
    pub truth: GroundTruth,
}

impl GrnNetwork {
    /// Wrap explicit coefficient matrices; `b` must describe a DAG.
    pub fn from_matrices(a: Array2<f64>, b: Array2<f64>) -> Result<Self, SimError> {
        let m = b.nrows();
        if b.ncols() != m || a.nrows() != m {
            return Err(SimError::Shape(format!("A is {}x{}, B is {}x{}", a.nrows(), a.ncols(), b.nrows(), b.ncols())));
        }
        let direct = Array2::from_shape_fn((m, m), |(i, j)| i != j && b[(j, i)] != 0.0);
        if (0..m).any(|i| b[(i, i)] != 0.0) {
            return Err(SimError::Cyclic);
        }
        let order = topological_order(&direct).ok_or(SimError::Cyclic)?;
        Ok(GrnNetwork { a, b, order, truth: GroundTruth::from_direct(direct) })
    }

    pub fn n_traits(&self) -> usize {
        self.b.nrows()
    }

    pub fn n_markers(&self) -> usize {
        self.a.ncols()
    }

    /// `B` with rows and columns permuted into topological order; strictly
    /// lower triangular by construction.
    pub fn b_in_order(&self) -> Array2<f64> {
        let m = self.n_traits();
        Array2::from_shape_fn((m, m), |(r, c)| self.b[(self.order[r], self.order[c])])
    }
}

/// Kahn's algorithm, always taking the smallest ready node.
fn topological_order(direct: &Array2<bool>) -> Option<Vec<usize>> {
    let m = direct.nrows();
    let mut indeg: Vec<usize> = (0..m).map(|j| (0..m).filter(|&i| direct[(i, j)]).count()).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..m).filter(|&j| indeg[j] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for j in 0..m {
            if direct[(i, j)] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
    }
    (order.len() == m).then_some(order)
}

/// Random network: a uniform topological order, forward edges included
/// independently, marker links with probability `marker_link_prob`, all
/// nonzero coefficients uniform on `coefficient_range`.
pub fn gen_grn(spec: &GrnSpec) -> Result<GrnNetwork, SimError> {
    let q = spec.edge_probability()?;
    if !(0.0..=1.0).contains(&spec.marker_link_prob) {
        return Err(SimError::LinkProbability(spec.marker_link_prob));
    }
    let (lo, hi) = spec.coefficient_range;
    let coef = Uniform::new(lo, hi).map_err(|_| SimError::CoefficientRange(lo, hi))?;
    let mut rng = rng_for(spec.seed, STREAM_NETWORK);
    let m = spec.m;

    let mut order: Vec<usize> = (0..m).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
    let mut b = Array2::zeros((m, m));
    for to in 1..m {
        for from in 0..to {
            if rng.random_bool(q) {
                b[(order[to], order[from])] = nonzero_uniform(&mut rng, &coef);
            }
        }
    }
    let mut a = Array2::zeros((m, spec.l));
    for v in a.iter_mut() {
        if rng.random_bool(spec.marker_link_prob) {
            *v = nonzero_uniform(&mut rng, &coef);
        }
    }
    let direct = Array2::from_shape_fn((m, m), |(i, j)| b[(j, i)] != 0.0);
    Ok(GrnNetwork { a, b, order, truth: GroundTruth::from_direct(direct) })
}

/// `n` samples of markers (`n × l`, Bernoulli with per-marker success
/// probability from U(0.1, 0.5)) and traits (`n × m`), solved by forward
/// substitution along the topological order.
pub fn sample_grn_data(net: &GrnNetwork, n: usize, seed: u64) -> (Array2<f64>, Array2<f64>) {
    let (m, l) = (net.n_traits(), net.n_markers());
    let mut rng = rng_for(seed, STREAM_DATA);
    let probs: Vec<Bernoulli> = (0..l)
        .map(|_| {
            let p = rng.random_range(BERNOULLI_P_RANGE.0..BERNOULLI_P_RANGE.1);
            Bernoulli::new(p).expect("p in range")
        })
        .collect();
    let mut markers = Array2::zeros((n, l));
    for mut row in markers.rows_mut() {
        for (v, d) in row.iter_mut().zip(&probs) {
            *v = f64::from(u8::from(d.sample(&mut rng)));
        }
    }
    let mut traits = markers.dot(&net.a.t());
    for v in traits.iter_mut() {
        *v += rng.sample::<f64, _>(StandardNormal);
    }
    let parents: Vec<Vec<(usize, f64)>> =
        (0..m).map(|j| (0..m).filter(|&i| net.b[(j, i)] != 0.0).map(|i| (i, net.b[(j, i)])).collect()).collect();
    for &j in &net.order {
        for &(i, c) in &parents[j] {
            let src: Array1<f64> = traits.column(i).to_owned();
            traits.column_mut(j).scaled_add(c, &src);
        }
    }
    (markers, traits)
}
