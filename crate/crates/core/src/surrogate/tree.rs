//! Least-squares regression trees with axis-aligned splits.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 3,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// A leaf with no training samples predicts 0.
    Leaf { value: f64, count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    n_features: usize,
    nodes: Vec<Node>,
}

/// Per-feature ordering of the sample positions, shared by every tree fit on
/// the same design matrix.
pub struct SortedFeatures {
    order: Vec<Vec<usize>>,
}

impl SortedFeatures {
    /// `rows[p]` is the design-matrix row at sample position `p` (repeats allowed).
    pub fn new(x: &[Vec<f64>], rows: &[usize]) -> Self {
        let n_features = x.first().map_or(0, Vec::len);
        let order = (0..n_features)
            .map(|f| {
                let mut pos: Vec<usize> = (0..rows.len()).collect();
                // stable sort keeps equal values in position order
                pos.sort_by(|&a, &b| x[rows[a]][f].total_cmp(&x[rows[b]][f]));
                pos
            })
            .collect();
        SortedFeatures { order }
    }
}

/// Random feature subsampling at each split (random-forest style).
pub struct FeatureSampler<'a, R: Rng> {
    pub rng: &'a mut R,
    pub max_features: usize,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    rows: &'a [usize],
    targets: &'a [f64],
    sorted: &'a SortedFeatures,
    params: TreeParams,
    node_of: Vec<usize>,
    nodes: Vec<Node>,
    /// Sample positions per leaf, filled in when requested.
    leaf_members: Option<Vec<(usize, Vec<usize>)>>,
}

struct Best {
    feature: usize,
    threshold: f64,
    sse: f64,
}

/// Relative SSE gap below which two candidate splits count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

fn sse_of(sum: f64, sum_sq: f64, n: usize) -> f64 {
    (sum_sq - sum * sum / n as f64).max(0.0)
}

impl<'a> Builder<'a> {
    fn members(&self, node: usize) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&p| self.node_of[p] == node)
            .collect()
    }

    fn best_split(
        &self,
        node: usize,
        count: usize,
        features: &[usize],
        node_sse: f64,
    ) -> Option<Best> {
        let tie = TIE_TOLERANCE * node_sse;
        let min_leaf = self.params.min_samples_leaf.max(1);
        let mut best: Option<Best> = None;
        for &f in features {
            let mut sum_l = 0.0;
            let mut sq_l = 0.0;
            let mut n_l = 0usize;
            let ordered: Vec<usize> = self.sorted.order[f]
                .iter()
                .copied()
                .filter(|&p| self.node_of[p] == node)
                .collect();
            let total: f64 = ordered.iter().map(|&p| self.targets[p]).sum();
            let total_sq: f64 = ordered.iter().map(|&p| self.targets[p].powi(2)).sum();
            for w in 0..ordered.len().saturating_sub(1) {
                let p = ordered[w];
                let r = self.targets[p];
                sum_l += r;
                sq_l += r * r;
                n_l += 1;
                let a = self.x[self.rows[p]][f];
                let b = self.x[self.rows[ordered[w + 1]]][f];
                if a == b || n_l < min_leaf || count - n_l < min_leaf {
                    continue;
                }
                let sse = sse_of(sum_l, sq_l, n_l)
                    + sse_of(total - sum_l, total_sq - sq_l, count - n_l);
                if best.as_ref().is_none_or(|bst| sse < bst.sse - tie) {
                    let mid = a + (b - a) / 2.0;
                    best = Some(Best {
                        feature: f,
                        threshold: mid,
                        sse,
                    });
                }
            }
        }
        best
    }

    fn grow<R: Rng>(
        &mut self,
        node: usize,
        depth: usize,
        sampler: &mut Option<FeatureSampler<'_, R>>,
    ) {
        let members = self.members(node);
        let count = members.len();
        let (sum, sum_sq, lo, hi) = members.iter().fold(
            (0.0, 0.0, f64::INFINITY, f64::NEG_INFINITY),
            |(s, q, lo, hi), &p| {
                let r = self.targets[p];
                (s + r, q + r * r, lo.min(r), hi.max(r))
            },
        );
        let mean = if count == 0 { 0.0 } else { sum / count as f64 };
        let leaf = Node::Leaf { value: mean, count };

        let min_leaf = self.params.min_samples_leaf.max(1);
        let stop = depth >= self.params.max_depth || count < 2 * min_leaf || lo == hi;
        let best = if stop {
            None
        } else {
            let n_features = self.sorted.order.len();
            let features: Vec<usize> = match sampler {
                Some(s) if s.max_features < n_features => {
                    let mut f = sample(s.rng, n_features, s.max_features.max(1)).into_vec();
                    f.sort_unstable();
                    f
                }
                _ => (0..n_features).collect(),
            };
            let node_sse = sse_of(sum, sum_sq, count);
            self.best_split(node, count, &features, node_sse)
                .filter(|b| b.sse < node_sse * (1.0 - TIE_TOLERANCE))
        };

        match best {
            None => {
                self.nodes[node] = leaf;
                if let Some(lm) = self.leaf_members.as_mut() {
                    lm.push((node, members));
                }
            }
            Some(b) => {
                let left = self.nodes.len();
                let right = left + 1;
                self.nodes.push(Node::Leaf { value: 0.0, count: 0 });
                self.nodes.push(Node::Leaf { value: 0.0, count: 0 });
                for &p in &members {
                    self.node_of[p] = if self.x[self.rows[p]][b.feature] <= b.threshold {
                        left
                    } else {
                        right
                    };
                }
                self.nodes[node] = Node::Split {
                    feature: b.feature,
                    threshold: b.threshold,
                    left,
                    right,
                };
                self.grow(left, depth + 1, sampler);
                self.grow(right, depth + 1, sampler);
            }
        }
    }
}

/// Per-leaf training membership returned alongside a fitted tree.
pub type LeafMembers = Vec<(usize, Vec<usize>)>;

impl RegressionTree {
    /// Greedy least-squares fit of `targets` on the rows of `x`.
    ///
    /// Each node takes the (feature, threshold) minimizing the summed child
    /// SSE; ties go to the lowest feature index, then the lowest threshold.
    /// Growth stops at `max_depth`, at `min_samples_leaf`, at zero residual
    /// spread, or when no split lowers the SSE.
    pub fn fit(x: &[Vec<f64>], targets: &[f64], params: TreeParams) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Empty("tree training set"));
        }
        let rows: Vec<usize> = (0..x.len()).collect();
        let sorted = SortedFeatures::new(x, &rows);
        Self::fit_presorted(x, &rows, targets, &sorted, params)
    }

    pub fn fit_presorted(
        x: &[Vec<f64>],
        rows: &[usize],
        targets: &[f64],
        sorted: &SortedFeatures,
        params: TreeParams,
    ) -> Result<Self> {
        Self::fit_general::<rand_chacha::ChaCha8Rng>(x, rows, targets, sorted, params, None, false)
            .map(|(t, _)| t)
    }

    /// Fit with optional feature subsampling; optionally report which sample
    /// positions landed in each leaf.
    pub fn fit_general<R: Rng>(
        x: &[Vec<f64>],
        rows: &[usize],
        targets: &[f64],
        sorted: &SortedFeatures,
        params: TreeParams,
        mut sampler: Option<FeatureSampler<'_, R>>,
        record_leaves: bool,
    ) -> Result<(Self, LeafMembers)> {
        if rows.is_empty() {
            return Err(Error::Empty("tree training set"));
        }
        if targets.len() != rows.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: targets.len(),
            });
        }
        let n_features = x[rows[0]].len();
        let mut b = Builder {
            x,
            rows,
            targets,
            sorted,
            params,
            node_of: vec![0; rows.len()],
            nodes: vec![Node::Leaf { value: 0.0, count: 0 }],
            leaf_members: record_leaves.then(Vec::new),
        };
        b.grow(0, 0, &mut sampler);
        let leaves = b.leaf_members.unwrap_or_default();
        Ok((
            RegressionTree {
                n_features,
                nodes: b.nodes,
            },
            leaves,
        ))
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Node id of the leaf `x` falls into.
    pub fn leaf_id(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
                Node::Leaf { .. } => return i,
            }
        }
    }

    pub fn leaf(&self, x: &[f64]) -> (f64, usize) {
        match self.nodes[self.leaf_id(x)] {
            Node::Leaf { value, count } if count > 0 => (value, count),
            Node::Leaf { count, .. } => (0.0, count),
            Node::Split { .. } => unreachable!("leaf_id returns a leaf"),
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.leaf(x).0
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}
