//! Command-line harness: TOML experiment configs, run artifacts, benchmark
//! suites, and OpenQASM 2.0 import/export.

pub mod artifacts;
pub mod bench;
pub mod commands;
pub mod config;
pub mod error;
pub mod qasm;

pub use config::{Experiment, ExperimentConfig};
pub use error::{HarnessError, Result};
