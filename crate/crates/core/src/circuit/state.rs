use num_complex::Complex64;

use super::ansatz::{AnsatzSpec, Circuit, Gate, ParameterVector};
use super::distribution::ProbabilityDistribution;
use crate::error::Result;

/// Pure state of `n_qubits` qubits.
///
/// Amplitude index `i` is read as the big-endian bitstring `q0 q1 … q(n-1)`,
/// so qubit `q` corresponds to bit `n - 1 - q` of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    pub fn apply(&mut self, gate: &Gate) {
        match *gate {
            Gate::Ry { qubit, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let m = self.mask(qubit);
                for i in (0..self.amplitudes.len()).filter(|i| i & m == 0) {
                    let a0 = self.amplitudes[i];
                    let a1 = self.amplitudes[i | m];
                    self.amplitudes[i] = a0 * c - a1 * s;
                    self.amplitudes[i | m] = a0 * s + a1 * c;
                }
            }
            Gate::Rz { qubit, angle } => {
                let lo = Complex64::from_polar(1.0, -angle / 2.0);
                let hi = Complex64::from_polar(1.0, angle / 2.0);
                let m = self.mask(qubit);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    *a *= if i & m == 0 { lo } else { hi };
                }
            }
            Gate::Cx { control, target } => {
                let cm = self.mask(control);
                let tm = self.mask(target);
                for i in 0..self.amplitudes.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amplitudes.swap(i, i | tm);
                    }
                }
            }
        }
    }

    /// Measurement distribution in the computational basis.
    pub fn distribution(&self) -> ProbabilityDistribution {
        ProbabilityDistribution::from_exact_unchecked(
            self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        )
    }
}

/// Apply a concrete circuit to `|0…0⟩`.
pub fn simulate_circuit(circuit: &Circuit) -> StateVector {
    let mut state = StateVector::zero(circuit.n_qubits);
    for g in &circuit.gates {
        state.apply(g);
    }
    state
}

/// State `C(θ)|0…0⟩` of the ansatz instance.
pub fn simulate(spec: &AnsatzSpec, theta: &ParameterVector) -> Result<StateVector> {
    Ok(simulate_circuit(&spec.circuit(theta)?))
}

pub fn output_distribution(state: &StateVector) -> ProbabilityDistribution {
    state.distribution()
}
