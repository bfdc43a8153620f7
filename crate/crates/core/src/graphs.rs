//! Three-node causal graphs and the priors they induce on CI models.
//!
//! Every DAG or directed MAG over three nodes is enumerated from its edge
//! marks, mapped to the CI model it entails by d/m-separation, and counted.
//! A uniform prior over graphs then gives `p(M_j) ∝ |M_j|`.

use serde::Serialize;
use thiserror::Error;

use crate::posterior::{PriorError, PriorWeights};
use crate::structure::{pair_index, CiModel, ZeroPattern, PAIRS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GraphKind {
    Dag,
    Dmag,
}

/// Edge between the two nodes `(a, b)`, `a < b`, of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeMark {
    Absent,
    /// a → b
    Forward,
    /// b → a
    Backward,
    /// a ↔ b
    Bidirected,
}

const DAG_MARKS: [EdgeMark; 3] = [EdgeMark::Absent, EdgeMark::Forward, EdgeMark::Backward];
const DMAG_MARKS: [EdgeMark; 4] = [EdgeMark::Absent, EdgeMark::Forward, EdgeMark::Backward, EdgeMark::Bidirected];

/// A causal graph over nodes 0, 1, 2, one edge mark per pair (pair indexing
/// as in [`crate::structure`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CausalGraph3 {
    pub kind: GraphKind,
    pub marks: [EdgeMark; 3],
}

impl CausalGraph3 {
    pub fn empty(kind: GraphKind) -> Self {
        CausalGraph3 { kind, marks: [EdgeMark::Absent; 3] }
    }

    /// Build from directed edges `(from, to)` and bidirected pairs.
    pub fn from_edges(kind: GraphKind, directed: &[(usize, usize)], bidirected: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(kind);
        for &(from, to) in directed {
            g.marks[pair_index(from, to)] = if from < to { EdgeMark::Forward } else { EdgeMark::Backward };
        }
        for &(a, b) in bidirected {
            g.marks[pair_index(a, b)] = EdgeMark::Bidirected;
        }
        g
    }

    fn mark(&self, a: usize, b: usize) -> EdgeMark {
        self.marks[pair_index(a, b)]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.mark(a, b) != EdgeMark::Absent
    }

    pub fn edge_count(&self) -> usize {
        self.marks.iter().filter(|&&m| m != EdgeMark::Absent).count()
    }

    /// Whether the edge `from → to` is present.
    pub fn has_directed(&self, from: usize, to: usize) -> bool {
        match self.mark(from, to) {
            EdgeMark::Forward => from < to,
            EdgeMark::Backward => from > to,
            _ => false,
        }
    }

    /// Whether the edge between `a` and `b` has an arrowhead at `at`.
    pub fn arrowhead_at(&self, a: usize, b: usize, at: usize) -> bool {
        let other = if at == a { b } else { a };
        match self.mark(a, b) {
            EdgeMark::Absent => false,
            EdgeMark::Bidirected => true,
            _ => self.has_directed(other, at),
        }
    }

    /// Whether any edge points into `node`.
    pub fn has_arrowhead_into(&self, node: usize) -> bool {
        (0..3).filter(|&o| o != node).any(|o| self.arrowhead_at(node, o, node))
    }

    /// Directed-path reachability `from ⇒ to` (length ≥ 1).
    pub fn is_proper_ancestor(&self, from: usize, to: usize) -> bool {
        if from == to {
            return false;
        }
        let via = 3 - from - to;
        self.has_directed(from, to) || (self.has_directed(from, via) && self.has_directed(via, to))
    }

    fn is_ancestor_of_set(&self, node: usize, set: &[usize]) -> bool {
        set.iter().any(|&s| s == node || self.is_proper_ancestor(node, s))
    }

    pub fn has_directed_cycle(&self) -> bool {
        (0..3).any(|a| (0..3).any(|b| a != b && self.has_directed(a, b) && self.is_proper_ancestor(b, a)))
    }

    /// No directed cycle and, for DMAGs, no bidirected edge between a node
    /// and one of its ancestors. DAGs may not carry bidirected edges.
    pub fn is_valid(&self) -> bool {
        if self.has_directed_cycle() {
            return false;
        }
        PAIRS.iter().all(|&(a, b)| match self.mark(a, b) {
            EdgeMark::Bidirected => {
                self.kind == GraphKind::Dmag && !self.is_proper_ancestor(a, b) && !self.is_proper_ancestor(b, a)
            }
            _ => true,
        })
    }

    /// An ancestral graph is maximal when no non-adjacent pair is joined by
    /// an inducing path. Over three nodes the only candidate is `a *→ w ←* b`
    /// with `w` an ancestor of `a` or `b`.
    pub fn is_maximal(&self) -> bool {
        PAIRS.iter().all(|&(a, b)| {
            if self.adjacent(a, b) {
                return true;
            }
            let w = 3 - a - b;
            let collider = self.arrowhead_at(a, w, w) && self.arrowhead_at(b, w, w);
            !(collider && (self.is_proper_ancestor(w, a) || self.is_proper_ancestor(w, b)))
        })
    }

    /// m-separation (d-separation for DAGs) of `a` and `b` given either the
    /// empty set or the third node. Paths have at most two edges.
    pub fn separated(&self, a: usize, b: usize, given_third: bool) -> bool {
        if self.adjacent(a, b) {
            return false;
        }
        let w = 3 - a - b;
        if !(self.adjacent(a, w) && self.adjacent(w, b)) {
            return true;
        }
        let given: &[usize] = if given_third { &[w] } else { &[] };
        let collider = self.arrowhead_at(a, w, w) && self.arrowhead_at(b, w, w);
        let open = if collider { self.is_ancestor_of_set(w, given) } else { !given.contains(&w) };
        !open
    }

    /// The CI model entailed by the graph's separation statements.
    pub fn ci_model(&self) -> CiModel {
        ci_model_of(self)
    }
}

/// Read the independence pattern off the graph and look up its model.
pub fn ci_model_of(g: &CausalGraph3) -> CiModel {
    let mut pattern = ZeroPattern::default();
    for (p, &(a, b)) in PAIRS.iter().enumerate() {
        pattern.cov[p] = g.separated(a, b, false);
        pattern.prec[p] = g.separated(a, b, true);
    }
    pattern.model().expect("separation statements of a valid graph form a CI model")
}

/// Which graphs to admit and how to weight them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorSpec {
    pub kind: GraphKind,
    /// Node that receives no arrowheads (it precedes everything else).
    pub bk_root: Option<usize>,
    /// Independent per-pair edge probability; `None` means uniform over graphs.
    pub edge_prob_q: Option<f64>,
    /// Directed edges `(from, to)` no admitted graph may contain.
    pub forbidden_edges: Vec<(usize, usize)>,
    /// Directed edges `(from, to)` every admitted graph must contain.
    pub required_edges: Vec<(usize, usize)>,
}

impl PriorSpec {
    pub fn uniform(kind: GraphKind) -> Self {
        PriorSpec { kind, bk_root: None, edge_prob_q: None, forbidden_edges: Vec::new(), required_edges: Vec::new() }
    }

    /// Uniform over graphs in which the first variable has no arrowheads.
    pub fn with_first_as_root(kind: GraphKind) -> Self {
        PriorSpec { bk_root: Some(0), ..Self::uniform(kind) }
    }

    /// Named presets: `dag`, `dmag`, `dag-bk`, `dmag-bk`.
    pub fn preset(name: &str) -> Option<Self> {
        Some(match name {
            "dag" => Self::uniform(GraphKind::Dag),
            "dmag" => Self::uniform(GraphKind::Dmag),
            "dag-bk" => Self::with_first_as_root(GraphKind::Dag),
            "dmag-bk" => Self::with_first_as_root(GraphKind::Dmag),
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<(), GraphPriorError> {
        if let Some(r) = self.bk_root {
            if r > 2 {
                return Err(GraphPriorError::BadNode(r));
            }
        }
        if let Some(q) = self.edge_prob_q {
            if !(0.0..=1.0).contains(&q) {
                return Err(GraphPriorError::BadEdgeProbability(q));
            }
        }
        for &(a, b) in self.forbidden_edges.iter().chain(&self.required_edges) {
            if a > 2 || b > 2 {
                return Err(GraphPriorError::BadNode(a.max(b)));
            }
            if a == b {
                return Err(GraphPriorError::SelfLoop(a));
            }
        }
        if let Some(&e) = self.required_edges.iter().find(|e| self.forbidden_edges.contains(e)) {
            return Err(GraphPriorError::Contradictory(e.0, e.1));
        }
        Ok(())
    }

    fn admits(&self, g: &CausalGraph3) -> bool {
        if let Some(root) = self.bk_root {
            if g.has_arrowhead_into(root) {
                return false;
            }
        }
        self.forbidden_edges.iter().all(|&(a, b)| !g.has_directed(a, b))
            && self.required_edges.iter().all(|&(a, b)| g.has_directed(a, b))
    }

    fn graph_weight(&self, g: &CausalGraph3) -> f64 {
        match self.edge_prob_q {
            None => 1.0,
            Some(q) => {
                let present = g.edge_count() as i32;
                q.powi(present) * (1.0 - q).powi(3 - present)
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphPriorError {
    #[error("node index {0} out of range (expected 0, 1 or 2)")]
    BadNode(usize),
    #[error("edge probability {0} outside [0, 1]")]
    BadEdgeProbability(f64),
    #[error("edge constraint on node {0} to itself")]
    SelfLoop(usize),
    #[error("edge {0} -> {1} is both required and forbidden")]
    Contradictory(usize, usize),
    #[error("no graph satisfies the prior constraints")]
    NoGraphs,
    #[error("every admitted graph has zero prior weight")]
    ZeroMass,
    #[error(transparent)]
    Prior(#[from] PriorError),
}

/// Every valid graph of the given kind admitted by the spec's background
/// knowledge and edge constraints (the edge probability is ignored here).
pub fn enumerate_graphs(spec: &PriorSpec) -> Vec<CausalGraph3> {
    let marks: &[EdgeMark] = match spec.kind {
        GraphKind::Dag => &DAG_MARKS,
        GraphKind::Dmag => &DMAG_MARKS,
    };
    let mut out = Vec::new();
    for &m0 in marks {
        for &m1 in marks {
            for &m2 in marks {
                let g = CausalGraph3 { kind: spec.kind, marks: [m0, m1, m2] };
                if g.is_valid() && spec.admits(&g) {
                    out.push(g);
                }
            }
        }
    }
    out
}

/// Number of admitted graphs in each CI model class.
pub fn class_counts(spec: &PriorSpec) -> [usize; CiModel::COUNT] {
    let mut counts = [0; CiModel::COUNT];
    for g in enumerate_graphs(spec) {
        counts[g.ci_model().index()] += 1;
    }
    counts
}

/// Prior over CI models: graph weights summed per class, normalized.
pub fn build_prior(spec: &PriorSpec) -> Result<PriorWeights, GraphPriorError> {
    spec.validate()?;
    let graphs = enumerate_graphs(spec);
    if graphs.is_empty() {
        return Err(GraphPriorError::NoGraphs);
    }
    let mut w = [0.0; CiModel::COUNT];
    for g in &graphs {
        w[g.ci_model().index()] += spec.graph_weight(g);
    }
    PriorWeights::from_unnormalized(w).map_err(|e| match e {
        PriorError::AllZero => GraphPriorError::ZeroMass,
        other => other.into(),
    })
}

/// Per-class graph counts for DAG, DAG with root, DMAG, DMAG with root.
pub fn count_table() -> [[usize; 4]; CiModel::COUNT] {
    let columns = [
        class_counts(&PriorSpec::uniform(GraphKind::Dag)),
        class_counts(&PriorSpec::with_first_as_root(GraphKind::Dag)),
        class_counts(&PriorSpec::uniform(GraphKind::Dmag)),
        class_counts(&PriorSpec::with_first_as_root(GraphKind::Dmag)),
    ];
    let mut table = [[0; 4]; CiModel::COUNT];
    for (j, row) in table.iter_mut().enumerate() {
        for (c, col) in columns.iter().enumerate() {
            row[c] = col[j];
        }
    }
    table
}
