use serde::{Deserialize, Serialize};

use crate::acquisition::AcquisitionConfig;
use crate::error::{Error, Result};
use crate::surrogate::SurrogateConfig;
use crate::targets::ReferenceMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mode {
    /// One surrogate over all parameters.
    Full,
    /// Random blocks of `block_size` indices, optimized like layers.
    RandomSubspace {
        block_size: usize,
        #[serde(default)]
        reshuffle_each_cycle: bool,
    },
    /// One block per ansatz layer.
    Layerwise,
}

/// Which records a block surrogate trains on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockTraining {
    /// Every record, projected onto the block coordinates.
    #[default]
    AllRecords,
    /// Records lying in the current slice: off-block coordinates equal to
    /// the snapshot incumbent's. Falls back to all records when too few.
    EpochRecords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    /// One thread per block between synchronization barriers.
    #[default]
    Concurrent,
    /// Blocks run one after another in block order.
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: Mode,
    /// Outer synchronization cycles; `None` runs until `max_evaluations`.
    pub cycles: Option<usize>,
    /// Total evaluation budget, warm-up included.
    pub max_evaluations: Option<usize>,
    /// Warm-up draws; defaults to `max(10, 2d)`.
    pub n_init: Option<usize>,
    /// Shots per evaluation; `None` evaluates the exact distribution.
    pub shots: Option<u64>,
    /// Half-width of injected uniform noise on every observation.
    pub noise: Option<f64>,
    pub reference: ReferenceMode,
    pub inner_iters: usize,
    pub acquisition: AcquisitionConfig,
    pub surrogate: SurrogateConfig,
    pub block_training: BlockTraining,
    pub execution: Execution,
    /// Zero every wall-clock field so emitted artifacts are reproducible.
    pub deterministic: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Layerwise,
            cycles: None,
            max_evaluations: Some(300),
            n_init: None,
            shots: None,
            noise: None,
            reference: ReferenceMode::Exact,
            inner_iters: 5,
            acquisition: AcquisitionConfig::default(),
            surrogate: SurrogateConfig::default(),
            block_training: BlockTraining::AllRecords,
            execution: Execution::Concurrent,
            deterministic: false,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn warm_up_count(&self, d: usize) -> usize {
        self.n_init.unwrap_or_else(|| (2 * d).max(10))
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::invalid("parameter dimension must be at least 1"));
        }
        if self.cycles.is_none() && self.max_evaluations.is_none() {
            return Err(Error::invalid("set cycles, max_evaluations, or both"));
        }
        if self.n_init == Some(0) {
            return Err(Error::invalid("n_init must be at least 1"));
        }
        let n_init = self.warm_up_count(d);
        if n_init < self.surrogate.min_records() {
            return Err(Error::invalid(format!(
                "{} surrogate needs n_init >= {}",
                self.surrogate.name(),
                self.surrogate.min_records()
            )));
        }
        if self.shots == Some(0) {
            return Err(Error::invalid("shots must be at least 1"));
        }
        if let Some(s) = self.noise {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::invalid("noise must be finite and non-negative"));
            }
        }
        if self.inner_iters == 0 {
            return Err(Error::invalid("inner_iters must be at least 1"));
        }
        if let Mode::RandomSubspace { block_size, .. } = self.mode {
            if block_size == 0 || block_size > d {
                return Err(Error::invalid(format!(
                    "block_size {block_size} outside [1, {d}]"
                )));
            }
        }
        if let ReferenceMode::Shots { shots: 0, .. } = self.reference {
            return Err(Error::invalid("reference shots must be at least 1"));
        }
        self.acquisition.validate()?;
        self.surrogate.validate()
    }
}
