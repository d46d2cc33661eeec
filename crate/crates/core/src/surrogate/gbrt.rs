//! Gradient-boosted regression trees under squared loss.
//!
//! The ensemble predicts `base + ν Σ_m h_m(θ)`, where `base` is the target
//! mean and stage `m` fits the residuals `y_i − f̂_{m−1}(θ_i)`. Uncertainty is
//! the spread of the per-tree outputs `h_m(θ)`, floored at `η` away from data.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, SortedFeatures, TreeParams};
use super::{Surrogate, UncertainPrediction};
use crate::circuit::euclidean;
use crate::error::{Error, Result};

/// Version tag of the JSON model dump.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GbrtParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Floor trigger distance as a fraction of the box diameter `2π√d`.
    pub floor_fraction: f64,
}

impl Default for GbrtParams {
    fn default() -> Self {
        GbrtParams {
            n_trees: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_samples_leaf: 1,
            floor_fraction: 0.01,
        }
    }
}

impl GbrtParams {
    pub fn tree(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::invalid("GBRT needs at least one tree"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::invalid("learning rate must lie in (0, 1]"));
        }
        if self.floor_fraction.is_nan() || self.floor_fraction < 0.0 {
            return Err(Error::invalid("floor fraction must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedEnsemble {
    format_version: u32,
    base: f64,
    learning_rate: f64,
    tree_params: TreeParams,
    n_features: usize,
    trees: Vec<RegressionTree>,
}

/// Fit `n_trees` boosting stages on `(x, y)`.
pub fn fit_gbrt(x: &[Vec<f64>], y: &[f64], params: &GbrtParams) -> Result<BoostedEnsemble> {
    params.validate()?;
    if x.is_empty() {
        return Err(Error::Empty("GBRT training set"));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let n = x.len();
    let rows: Vec<usize> = (0..n).collect();
    let sorted = SortedFeatures::new(x, &rows);
    let base = y.iter().sum::<f64>() / n as f64;
    let mut pred = vec![base; n];
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut residual = vec![0.0; n];
    for _ in 0..params.n_trees {
        for i in 0..n {
            residual[i] = y[i] - pred[i];
        }
        let tree = RegressionTree::fit_presorted(x, &rows, &residual, &sorted, params.tree())?;
        for (p, xi) in pred.iter_mut().zip(x) {
            *p += params.learning_rate * tree.predict(xi);
        }
        trees.push(tree);
    }
    Ok(BoostedEnsemble {
        format_version: MODEL_FORMAT_VERSION,
        base,
        learning_rate: params.learning_rate,
        tree_params: params.tree(),
        n_features: x[0].len(),
        trees,
    })
}

impl BoostedEnsemble {
    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Raw tree outputs `h_m(x)`.
    pub fn tree_outputs(&self, x: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict(x)).collect()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.predict_unchecked(x))
    }

    fn predict_unchecked(&self, x: &[f64]) -> f64 {
        self.base
            + self
                .trees
                .iter()
                .map(|t| self.learning_rate * t.predict(x))
                .sum::<f64>()
    }

    /// Predictions after stages `0..=M` (stage 0 is the base constant).
    pub fn staged_predict(&self, x: &[f64]) -> Vec<f64> {
        let mut acc = self.base;
        let mut out = Vec::with_capacity(self.trees.len() + 1);
        out.push(acc);
        for t in &self.trees {
            acc += self.learning_rate * t.predict(x);
            out.push(acc);
        }
        out
    }

    /// Mean prediction with tree-spread uncertainty.
    ///
    /// `points` are the training inputs; when the nearest one is farther than
    /// `floor.delta`, the variance is raised to at least `floor.eta`.
    pub fn predict_uncertain(
        &self,
        x: &[f64],
        points: &[Vec<f64>],
        floor: &VarianceFloor,
    ) -> Result<UncertainPrediction> {
        self.check(x)?;
        if points.is_empty() {
            return Err(Error::Empty("dataset for uncertainty"));
        }
        let h = self.tree_outputs(x);
        let m = h.len() as f64;
        let tree_mean = h.iter().sum::<f64>() / m;
        let raw_var = h.iter().map(|v| (v - tree_mean).powi(2)).sum::<f64>() / m;
        let nearest = points
            .iter()
            .map(|p| euclidean(p, x))
            .fold(f64::INFINITY, f64::min);
        let (var, floor_applied) = if nearest > floor.delta {
            (raw_var.max(floor.eta), true)
        } else {
            (raw_var, false)
        };
        Ok(UncertainPrediction {
            mean: self.predict_unchecked(x),
            std: var.sqrt(),
            floor_applied,
            tree_mean,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ensemble serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: BoostedEnsemble =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }
}

/// `η = ν² / M_max · (1/t) Σ (y_i − ȳ)²`.
pub fn variance_floor_eta(ys: &[f64], learning_rate: f64, max_trees: usize) -> f64 {
    if ys.is_empty() || max_trees == 0 {
        return 0.0;
    }
    let t = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / t;
    let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / t;
    learning_rate * learning_rate / max_trees as f64 * var
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceFloor {
    pub delta: f64,
    pub eta: f64,
}

impl VarianceFloor {
    /// Floor for a `dim`-dimensional angle box and training targets `ys`.
    pub fn for_box(dim: usize, ys: &[f64], params: &GbrtParams) -> Self {
        VarianceFloor {
            delta: params.floor_fraction * TAU * (dim as f64).sqrt(),
            eta: variance_floor_eta(ys, params.learning_rate, params.n_trees),
        }
    }
}

/// A fitted ensemble bundled with its training inputs.
#[derive(Debug, Clone)]
pub struct GbrtSurrogate {
    pub ensemble: BoostedEnsemble,
    pub points: Vec<Vec<f64>>,
    pub floor: VarianceFloor,
}

impl GbrtSurrogate {
    pub fn fit(x: Vec<Vec<f64>>, y: &[f64], params: &GbrtParams) -> Result<Self> {
        let ensemble = fit_gbrt(&x, y, params)?;
        let floor = VarianceFloor::for_box(ensemble.n_features(), y, params);
        Ok(GbrtSurrogate {
            ensemble,
            points: x,
            floor,
        })
    }
}

impl Surrogate for GbrtSurrogate {
    fn predict(&self, x: &[f64]) -> UncertainPrediction {
        self.ensemble
            .predict_uncertain(x, &self.points, &self.floor)
            .expect("candidate dimension matches the fitted block")
    }
}
