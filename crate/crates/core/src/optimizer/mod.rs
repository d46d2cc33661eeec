//! The surrogate-guided optimization loop: warm-up over the full box, then
//! cycles of per-block proposals against a frozen snapshot followed by a
//! synchronization barrier. Full-space, random-subspace, and layerwise modes
//! differ only in how the parameter indices are partitioned.
//!
//! Every random draw is keyed by (master seed, stream, cycle, block, step) or
//! by the global evaluation index, so concurrent and sequential execution give
//! identical traces.

mod config;
mod objective;
mod partition;
mod run;

pub use config::{BlockTraining, Execution, Mode, RunConfig};
pub use objective::{evaluate_loss, Objective, Observation, StatePrepObjective};
pub use partition::{random_partition, LayerPartition};
pub use run::{
    run_surrogate_prep, BlockResult, CurvePoint, Event, Optimizer, PhaseTimings, RunResult,
    RunState,
};
