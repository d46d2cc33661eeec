//! Tree-based surrogate models of the loss landscape.

mod dataset;
mod gbrt;
mod qrf;
mod tree;

use serde::{Deserialize, Serialize};

pub use dataset::{EvaluationDataset, Phase, Record};
pub use gbrt::{
    fit_gbrt, variance_floor_eta, BoostedEnsemble, GbrtParams, GbrtSurrogate, VarianceFloor,
    MODEL_FORMAT_VERSION,
};
pub use qrf::{empirical_quantile, fit_qrf, QrfParams, QuantileForest};
pub use tree::{FeatureSampler, LeafMembers, Node, RegressionTree, SortedFeatures, TreeParams};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertainPrediction {
    /// Point prediction of the surrogate.
    pub mean: f64,
    pub std: f64,
    pub floor_applied: bool,
    /// Unshrunk mean of the per-tree outputs.
    pub tree_mean: f64,
}

impl UncertainPrediction {
    pub fn certain(mean: f64) -> Self {
        UncertainPrediction {
            mean,
            std: 0.0,
            floor_applied: false,
            tree_mean: mean,
        }
    }
}

/// A fitted model that scores candidate points.
pub trait Surrogate: Send + Sync {
    fn predict(&self, x: &[f64]) -> UncertainPrediction;

    /// Samples of the predictive distribution, for models that keep them.
    fn empirical_samples(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SurrogateConfig {
    Gbrt(#[serde(default)] GbrtParams),
    Qrf(#[serde(default)] QrfParams),
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig::Gbrt(GbrtParams::default())
    }
}

impl SurrogateConfig {
    pub fn fit(&self, x: Vec<Vec<f64>>, y: &[f64], seed: u64) -> Result<Box<dyn Surrogate>> {
        Ok(match self {
            SurrogateConfig::Gbrt(p) => Box::new(GbrtSurrogate::fit(x, y, p)?),
            SurrogateConfig::Qrf(p) => Box::new(fit_qrf(&x, y, p, seed)?),
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SurrogateConfig::Gbrt(p) => p.validate(),
            SurrogateConfig::Qrf(p) if p.n_trees == 0 => {
                Err(crate::error::Error::invalid("QRF needs at least one tree"))
            }
            SurrogateConfig::Qrf(_) => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SurrogateConfig::Gbrt(_) => "gbrt",
            SurrogateConfig::Qrf(_) => "qrf",
        }
    }

    /// Smallest dataset the model can be fit on.
    pub fn min_records(&self) -> usize {
        match self {
            SurrogateConfig::Gbrt(_) => 1,
            SurrogateConfig::Qrf(_) => 2,
        }
    }
}
