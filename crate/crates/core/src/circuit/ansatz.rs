use std::f64::consts::TAU;
use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the dense simulator accepts unless a caller raises it.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Parameterized single-qubit rotation kinds used by the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rotation {
    Ry,
    Rz,
}

/// One gate of a concrete circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    Cx { control: usize, target: usize },
}

impl Gate {
    pub fn rotation(kind: Rotation, qubit: usize, angle: f64) -> Gate {
        match kind {
            Rotation::Ry => Gate::Ry { qubit, angle },
            Rotation::Rz => Gate::Rz { qubit, angle },
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => Some(angle),
            Gate::Cx { .. } => None,
        }
    }
}

/// A concrete gate sequence on `n_qubits`, applied left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("circuit needs at least one qubit"));
        }
        for g in &gates {
            let ok = match *g {
                Gate::Ry { qubit, angle } | Gate::Rz { qubit, angle } => {
                    qubit < n_qubits && angle.is_finite()
                }
                Gate::Cx { control, target } => {
                    control < n_qubits && target < n_qubits && control != target
                }
            };
            if !ok {
                return Err(Error::invalid(format!("gate {g:?} invalid on {n_qubits} qubits")));
            }
        }
        Ok(Circuit { n_qubits, gates })
    }

    pub fn cx_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cx { .. }))
            .count()
    }

    /// Critical-path length with every gate taking one time step (ASAP schedule).
    pub fn depth(&self) -> usize {
        let mut ready = vec![0usize; self.n_qubits];
        for g in &self.gates {
            match *g {
                Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => ready[qubit] += 1,
                Gate::Cx { control, target } => {
                    let t = ready[control].max(ready[target]) + 1;
                    ready[control] = t;
                    ready[target] = t;
                }
            }
        }
        ready.into_iter().max().unwrap_or(0)
    }

    /// Rotation angles in gate order.
    pub fn angles(&self) -> Vec<f64> {
        self.gates.iter().filter_map(Gate::angle).collect()
    }
}

/// Layered ansatz: per layer, each qubit gets the rotations of `rotations`
/// (Ry before Rz), followed by the linear CX cascade `0→1, 1→2, …`.
///
/// Parameter index of (layer, qubit, rotation slot) is
/// `(layer * n_qubits + qubit) * rotations.len() + slot`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AnsatzConfig", into = "AnsatzConfig")]
pub struct AnsatzSpec {
    n_qubits: usize,
    n_layers: usize,
    rotations: Vec<Rotation>,
}

/// Wire form of [`AnsatzSpec`], validated on conversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfig {
    pub qubits: usize,
    pub layers: usize,
    #[serde(default = "default_rotations")]
    pub rotations: Vec<Rotation>,
}

fn default_rotations() -> Vec<Rotation> {
    vec![Rotation::Ry, Rotation::Rz]
}

impl TryFrom<AnsatzConfig> for AnsatzSpec {
    type Error = Error;
    fn try_from(c: AnsatzConfig) -> Result<Self> {
        AnsatzSpec::new(c.qubits, c.layers, &c.rotations)
    }
}

impl From<AnsatzSpec> for AnsatzConfig {
    fn from(s: AnsatzSpec) -> Self {
        AnsatzConfig {
            qubits: s.n_qubits,
            layers: s.n_layers,
            rotations: s.rotations,
        }
    }
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_layers: usize, rotations: &[Rotation]) -> Result<Self> {
        Self::with_max_qubits(n_qubits, n_layers, rotations, DEFAULT_MAX_QUBITS)
    }

    pub fn with_max_qubits(
        n_qubits: usize,
        n_layers: usize,
        rotations: &[Rotation],
        max_qubits: usize,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("n_qubits must be at least 1"));
        }
        if n_layers == 0 {
            return Err(Error::invalid("n_layers must be at least 1"));
        }
        if n_qubits > max_qubits {
            return Err(Error::Capacity {
                requested: n_qubits,
                max: max_qubits,
            });
        }
        let mut rotations = rotations.to_vec();
        rotations.sort();
        rotations.dedup();
        if rotations.is_empty() {
            return Err(Error::invalid("rotation set must not be empty"));
        }
        Ok(AnsatzSpec {
            n_qubits,
            n_layers,
            rotations,
        })
    }

    /// Standard hardware-efficient layout with Ry and Rz on every qubit.
    pub fn standard(n_qubits: usize, n_layers: usize) -> Result<Self> {
        Self::new(n_qubits, n_layers, &[Rotation::Ry, Rotation::Rz])
    }

    /// Real-amplitude layout (Ry only).
    pub fn real_amplitude(n_qubits: usize, n_layers: usize) -> Result<Self> {
        Self::new(n_qubits, n_layers, &[Rotation::Ry])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn params_per_layer(&self) -> usize {
        self.n_qubits * self.rotations.len()
    }

    pub fn param_count(&self) -> usize {
        self.params_per_layer() * self.n_layers
    }

    pub fn param_index(&self, layer: usize, qubit: usize, slot: usize) -> usize {
        (layer * self.n_qubits + qubit) * self.rotations.len() + slot
    }

    /// Index range of the parameters belonging to `layer`.
    pub fn layer_range(&self, layer: usize) -> Range<usize> {
        let w = self.params_per_layer();
        layer * w..(layer + 1) * w
    }

    /// Instantiate the template with concrete angles.
    pub fn circuit(&self, theta: &ParameterVector) -> Result<Circuit> {
        self.check_dim(theta)?;
        Ok(self.build(theta.as_slice()))
    }

    pub(crate) fn check_dim(&self, theta: &ParameterVector) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                found: theta.len(),
            });
        }
        Ok(())
    }

    fn build(&self, angles: &[f64]) -> Circuit {
        let n = self.n_qubits;
        let mut gates = Vec::with_capacity(self.param_count() + self.n_layers * (n - 1));
        let mut k = 0;
        for _ in 0..self.n_layers {
            for q in 0..n {
                for &r in &self.rotations {
                    gates.push(Gate::rotation(r, q, angles[k]));
                    k += 1;
                }
            }
            for q in 0..n.saturating_sub(1) {
                gates.push(Gate::Cx {
                    control: q,
                    target: q + 1,
                });
            }
        }
        Circuit { n_qubits: n, gates }
    }

    /// Depth and CX count of the template (angles do not matter).
    pub fn metrics(&self) -> CircuitMetrics {
        let c = self.build(&vec![0.0; self.param_count()]);
        CircuitMetrics {
            depth: c.depth(),
            cx_count: c.cx_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub depth: usize,
    pub cx_count: usize,
}

pub fn circuit_metrics(spec: &AnsatzSpec) -> CircuitMetrics {
    spec.metrics()
}

/// Point in the angle box `[0, 2π)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(Vec<f64>);

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Self {
        ParameterVector(values.into_iter().map(wrap_angle).collect())
    }

    pub fn zeros(d: usize) -> Self {
        ParameterVector(vec![0.0; d])
    }

    pub fn uniform<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        ParameterVector((0..d).map(|_| rng.random_range(0.0..TAU)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Copy of `self` with the listed coordinates taken from `values`.
    pub fn with_block(&self, indices: &[usize], values: &[f64]) -> Self {
        let mut v = self.0.clone();
        for (&i, &x) in indices.iter().zip(values) {
            v[i] = wrap_angle(x);
        }
        ParameterVector(v)
    }

    pub fn project(&self, indices: &[usize]) -> Vec<f64> {
        indices.iter().map(|&i| self.0[i]).collect()
    }

    pub fn distance(&self, other: &ParameterVector) -> f64 {
        euclidean(&self.0, &other.0)
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
