//! Quantile regression forest baseline.
//!
//! Bagged trees whose leaves keep the training targets that reached them.
//! Predictions pool the leaf samples of every tree; quantiles are read off
//! the pooled empirical distribution (inverse-CDF convention: the smallest
//! sample `v` with `F(v) ≥ q`).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{FeatureSampler, RegressionTree, SortedFeatures, TreeParams};
use super::{Surrogate, UncertainPrediction};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QrfParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Features tried per split as a fraction of the dimension (rounded up).
    pub feature_fraction: f64,
}

impl Default for QrfParams {
    fn default() -> Self {
        QrfParams {
            n_trees: 50,
            max_depth: 8,
            min_samples_leaf: 3,
            feature_fraction: 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone)]
struct ForestTree {
    tree: RegressionTree,
    /// Leaf node id → targets of the bootstrap samples in that leaf.
    leaf_samples: Vec<(usize, Vec<f64>)>,
}

#[derive(Debug, Clone)]
pub struct QuantileForest {
    n_features: usize,
    trees: Vec<ForestTree>,
}

pub fn fit_qrf(x: &[Vec<f64>], y: &[f64], params: &QrfParams, seed: u64) -> Result<QuantileForest> {
    if x.len() < 2 {
        return Err(Error::invalid("QRF needs at least two records"));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if params.n_trees == 0 {
        return Err(Error::invalid("QRF needs at least one tree"));
    }
    let n = x.len();
    let n_features = x[0].len();
    let max_features = ((n_features as f64 * params.feature_fraction).ceil() as usize).clamp(1, n_features.max(1));
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
    };
    let mut rng = seed::rng(seed);
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let targets: Vec<f64> = rows.iter().map(|&r| y[r]).collect();
        let sorted = SortedFeatures::new(x, &rows);
        let sampler = FeatureSampler {
            rng: &mut rng,
            max_features,
        };
        let (tree, leaves) = RegressionTree::fit_general(
            x,
            &rows,
            &targets,
            &sorted,
            tree_params,
            Some(sampler),
            true,
        )?;
        let leaf_samples = leaves
            .into_iter()
            .map(|(node, members)| (node, members.iter().map(|&p| targets[p]).collect()))
            .collect();
        trees.push(ForestTree { tree, leaf_samples });
    }
    Ok(QuantileForest { n_features, trees })
}

impl QuantileForest {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Multiset union of the leaf samples `x` reaches, in tree order.
    pub fn pooled_samples(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        for t in &self.trees {
            let id = t.tree.leaf_id(x);
            if let Some((_, s)) = t.leaf_samples.iter().find(|(n, _)| *n == id) {
                out.extend_from_slice(s);
            }
        }
        out
    }

    pub fn quantile(&self, q: f64, x: &[f64]) -> f64 {
        let mut s = self.pooled_samples(x);
        s.sort_by(f64::total_cmp);
        empirical_quantile(&s, q)
    }
}

/// Inverse-CDF quantile of an ascending sample.
pub fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let n = sorted.len();
    let k = ((q.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

impl Surrogate for QuantileForest {
    fn predict(&self, x: &[f64]) -> UncertainPrediction {
        let s = self.pooled_samples(x);
        let m = s.len().max(1) as f64;
        let mean = s.iter().sum::<f64>() / m;
        let var = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
        UncertainPrediction {
            mean,
            std: var.sqrt(),
            floor_applied: false,
            tree_mean: mean,
        }
    }

    fn empirical_samples(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(self.pooled_samples(x))
    }
}
