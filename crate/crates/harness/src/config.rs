//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use treeprep_core::circuit::{AnsatzConfig, AnsatzSpec};
use treeprep_core::diagnostics::DiagnosticsOptions;
use treeprep_core::optimizer::RunConfig;
use treeprep_core::targets::{TargetConfig, TargetSpec};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub target: TargetConfig,
    pub ansatz: AnsatzConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite_id: Option<String>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// A config whose target and ansatz have been built and checked.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub target: TargetSpec,
    pub spec: AnsatzSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Build the target and ansatz and validate the run settings.
    pub fn build(self) -> Result<Experiment> {
        let spec = AnsatzSpec::new(
            self.ansatz.qubits,
            self.ansatz.layers,
            &self.ansatz.rotations,
        )
        .map_err(HarnessError::from_setup)?;
        let target = self.target.generate().map_err(HarnessError::from_setup)?;
        if target.n_qubits() != spec.n_qubits() {
            return Err(HarnessError::Config(format!(
                "target has {} qubits but ansatz has {}",
                target.n_qubits(),
                spec.n_qubits()
            )));
        }
        self.run
            .validate(spec.param_count())
            .map_err(HarnessError::from_setup)?;
        Ok(Experiment {
            config: self,
            target,
            spec,
        })
    }
}
