//! Surrogate-guided variational state preparation with tree ensembles.
//!
//! The crate simulates a layered hardware-efficient ansatz, scores output
//! distributions against a target by total variation distance, and drives a
//! block-coordinate Bayesian-optimization loop whose surrogate is a gradient
//! boosted regression tree ensemble (or a quantile random forest).

pub mod acquisition;
pub mod circuit;
pub mod diagnostics;
pub mod error;
pub mod optimizer;
pub mod seed;
pub mod surrogate;
pub mod targets;

pub use circuit::{AnsatzSpec, ParameterVector, ProbabilityDistribution};
pub use error::{Error, Result};
pub use optimizer::{run_surrogate_prep, Mode, RunConfig, RunResult};
pub use targets::{TargetConfig, TargetSpec};
