//! Statevector simulation of the layered Ry/Rz + CX-cascade ansatz, shot
//! sampling, and distribution metrics.

mod ansatz;
mod distribution;
mod state;

pub use ansatz::{
    circuit_metrics, wrap_angle, AnsatzConfig, AnsatzSpec, Circuit, CircuitMetrics, Gate,
    ParameterVector, Rotation, DEFAULT_MAX_QUBITS,
};
pub(crate) use ansatz::euclidean;
pub use distribution::{sample_shots, tvd, DistributionKind, ProbabilityDistribution, SUM_TOLERANCE};
pub use state::{output_distribution, simulate, simulate_circuit, StateVector};
