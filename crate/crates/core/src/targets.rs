//! Target state families: random circuits (RQC), amplitude-encoded vectors
//! (QSP), and hidden-parameter instances of the ansatz itself (VQE).
//!
//! The RQC sampling law is our own choice: each of `depth` layers gives every
//! qubit one rotation drawn uniformly from {Ry, Rz} with a uniform angle, then
//! places one CX on a uniformly chosen nearest-neighbour edge `q → q+1`.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    sample_shots, simulate, simulate_circuit, AnsatzSpec, Circuit, Gate, ParameterVector,
    ProbabilityDistribution, Rotation, DEFAULT_MAX_QUBITS,
};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeSource {
    /// Standard normal entries.
    Gaussian,
    /// Uniform `[0, 1)` entries.
    Uniform,
}

fn default_vqe_rotations() -> Vec<Rotation> {
    vec![Rotation::Ry, Rotation::Rz]
}

/// Replayable description of a target; regenerating from it is bit-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetConfig {
    Rqc {
        qubits: usize,
        depth: usize,
        seed: u64,
    },
    Qsp {
        qubits: usize,
        source: AmplitudeSource,
        seed: u64,
    },
    Vqe {
        qubits: usize,
        layers: usize,
        seed: u64,
        #[serde(default = "default_vqe_rotations")]
        rotations: Vec<Rotation>,
    },
}

impl TargetConfig {
    pub fn n_qubits(&self) -> usize {
        match *self {
            TargetConfig::Rqc { qubits, .. }
            | TargetConfig::Qsp { qubits, .. }
            | TargetConfig::Vqe { qubits, .. } => qubits,
        }
    }

    pub fn generate(&self) -> Result<TargetSpec> {
        match self {
            TargetConfig::Rqc { qubits, depth, seed } => make_rqc(*qubits, *depth, *seed),
            TargetConfig::Qsp {
                qubits,
                source,
                seed,
            } => make_qsp(*qubits, *source, *seed),
            TargetConfig::Vqe {
                qubits,
                layers,
                seed,
                rotations,
            } => make_hidden_instance(&AnsatzSpec::new(*qubits, *layers, rotations)?, *seed),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            TargetConfig::Rqc { .. } => "rqc",
            TargetConfig::Qsp { .. } => "qsp",
            TargetConfig::Vqe { .. } => "vqe",
        }
    }
}

/// A generated target with its exact reference distribution.
#[derive(Debug, Clone)]
pub struct TargetSpec {
    config: TargetConfig,
    exact: ProbabilityDistribution,
    generator: Option<Circuit>,
    hidden: Option<(AnsatzSpec, ParameterVector)>,
}

impl TargetSpec {
    pub fn config(&self) -> &TargetConfig {
        &self.config
    }

    pub fn n_qubits(&self) -> usize {
        self.config.n_qubits()
    }

    pub fn exact_distribution(&self) -> &ProbabilityDistribution {
        &self.exact
    }

    /// Gate sequence that produced the target (RQC and VQE families).
    pub fn generator(&self) -> Option<&Circuit> {
        self.generator.as_ref()
    }

    /// The generating ansatz and its hidden angles, for known-optimum checks.
    pub fn hidden_instance(&self) -> Option<(&AnsatzSpec, &ParameterVector)> {
        self.hidden.as_ref().map(|(s, t)| (s, t))
    }

    /// QSP targets have real amplitudes, so Ry-only search suffices.
    pub fn real_amplitude(&self) -> bool {
        matches!(self.config, TargetConfig::Qsp { .. })
    }

    /// Reference statistics the loss compares against.
    pub fn reference(&self, mode: ReferenceMode) -> Result<ProbabilityDistribution> {
        match mode {
            ReferenceMode::Exact => Ok(self.exact.clone()),
            ReferenceMode::Shots { shots, seed } => sample_shots(&self.exact, shots, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum ReferenceMode {
    Exact,
    Shots { shots: u64, seed: u64 },
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n_qubits must be at least 1"));
    }
    if n > DEFAULT_MAX_QUBITS {
        return Err(Error::Capacity {
            requested: n,
            max: DEFAULT_MAX_QUBITS,
        });
    }
    Ok(())
}

pub fn make_rqc(n_qubits: usize, depth: usize, seed: u64) -> Result<TargetSpec> {
    check_qubits(n_qubits)?;
    if depth == 0 {
        return Err(Error::invalid("RQC depth must be at least 1"));
    }
    let mut rng = seed::rng(seed);
    let mut gates = Vec::new();
    for _ in 0..depth {
        for q in 0..n_qubits {
            let kind = if rng.random_bool(0.5) {
                Rotation::Ry
            } else {
                Rotation::Rz
            };
            gates.push(Gate::rotation(kind, q, rng.random_range(0.0..TAU)));
        }
        if n_qubits >= 2 {
            let q = rng.random_range(0..n_qubits - 1);
            gates.push(Gate::Cx {
                control: q,
                target: q + 1,
            });
        }
    }
    let circuit = Circuit::new(n_qubits, gates)?;
    let exact = simulate_circuit(&circuit).distribution();
    Ok(TargetSpec {
        config: TargetConfig::Rqc {
            qubits: n_qubits,
            depth,
            seed,
        },
        exact,
        generator: Some(circuit),
        hidden: None,
    })
}

/// Squared, ℓ2-normalized amplitudes.
pub fn amplitude_distribution(values: &[f64]) -> Result<ProbabilityDistribution> {
    let norm_sq: f64 = values.iter().map(|v| v * v).sum();
    if norm_sq == 0.0 || !norm_sq.is_finite() {
        return Err(Error::invalid("amplitude vector has zero or non-finite norm"));
    }
    ProbabilityDistribution::exact(values.iter().map(|v| v * v / norm_sq).collect())
}

fn draw_amplitudes(len: usize, source: AmplitudeSource, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    (0..len)
        .map(|_| match source {
            AmplitudeSource::Gaussian => rng.sample::<f64, _>(StandardNormal),
            AmplitudeSource::Uniform => rng.random::<f64>(),
        })
        .collect()
}

pub fn make_qsp(n_qubits: usize, source: AmplitudeSource, seed: u64) -> Result<TargetSpec> {
    check_qubits(n_qubits)?;
    let len = 1usize << n_qubits;
    let mut draw_seed = seed;
    let values = loop {
        let v = draw_amplitudes(len, source, draw_seed);
        if v.iter().any(|x| *x != 0.0) {
            break v;
        }
        draw_seed = draw_seed.wrapping_add(1);
    };
    Ok(TargetSpec {
        config: TargetConfig::Qsp {
            qubits: n_qubits,
            source,
            seed,
        },
        exact: amplitude_distribution(&values)?,
        generator: None,
        hidden: None,
    })
}

/// Hidden-parameter instance of `spec`: the loss has a global minimum of 0
/// at the hidden angles.
pub fn make_hidden_instance(spec: &AnsatzSpec, seed: u64) -> Result<TargetSpec> {
    let mut rng = seed::rng(seed);
    let theta = ParameterVector::uniform(spec.param_count(), &mut rng);
    let exact = simulate(spec, &theta)?.distribution();
    Ok(TargetSpec {
        config: TargetConfig::Vqe {
            qubits: spec.n_qubits(),
            layers: spec.n_layers(),
            seed,
            rotations: spec.rotations().to_vec(),
        },
        exact,
        generator: Some(spec.circuit(&theta)?),
        hidden: Some((spec.clone(), theta)),
    })
}

pub fn make_vqe(n_qubits: usize, n_layers: usize, seed: u64) -> Result<TargetSpec> {
    make_hidden_instance(&AnsatzSpec::standard(n_qubits, n_layers)?, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::tvd;

    #[test]
    fn rqc_validation_and_determinism() {
        assert!(make_rqc(3, 0, 1).is_err());
        assert!(make_rqc(0, 2, 1).is_err());
        assert!(make_rqc(13, 2, 1).unwrap_err().is_capacity());
        let a = make_rqc(3, 6, 7).unwrap();
        let b = make_rqc(3, 6, 7).unwrap();
        assert_eq!(a.exact_distribution(), b.exact_distribution());
        assert_eq!(a.generator(), b.generator());
        assert_ne!(
            a.exact_distribution(),
            make_rqc(3, 6, 8).unwrap().exact_distribution()
        );
        assert_eq!(a.generator().unwrap().cx_count(), 6);
    }

    #[test]
    fn qsp_constant_vector_is_uniform() {
        let p = amplitude_distribution(&[2.5; 8]).unwrap();
        for &x in p.probs() {
            assert!((x - 0.125).abs() < 1e-15);
        }
        assert!(amplitude_distribution(&[0.0; 4]).is_err());
    }

    #[test]
    fn qsp_sums_to_one() {
        for seed in 0..20 {
            for src in [AmplitudeSource::Gaussian, AmplitudeSource::Uniform] {
                let t = make_qsp(4, src, seed).unwrap();
                let s: f64 = t.exact_distribution().probs().iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!(t.real_amplitude());
            }
        }
    }

    #[test]
    fn vqe_self_match() {
        let t = make_vqe(4, 3, 5).unwrap();
        let (spec, theta) = t.hidden_instance().unwrap();
        assert_eq!(spec.param_count(), 24);
        let p = simulate(spec, theta).unwrap().distribution();
        assert_eq!(tvd(&p, t.exact_distribution()).unwrap(), 0.0);
        let again = make_vqe(4, 3, 5).unwrap();
        assert_eq!(again.hidden_instance().unwrap().1, theta);
    }

    #[test]
    fn reference_modes() {
        let t = make_vqe(2, 1, 3).unwrap();
        assert_eq!(&t.reference(ReferenceMode::Exact).unwrap(), t.exact_distribution());
        let m = ReferenceMode::Shots { shots: 500, seed: 4 };
        assert_eq!(t.reference(m).unwrap(), t.reference(m).unwrap());
        assert!(t.reference(ReferenceMode::Shots { shots: 0, seed: 4 }).is_err());
    }

    #[test]
    fn config_round_trip() {
        let c = TargetConfig::Vqe {
            qubits: 3,
            layers: 3,
            seed: 11,
            rotations: vec![Rotation::Ry],
        };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<TargetConfig>(&s).unwrap(), c);
        let g = c.generate().unwrap();
        assert_eq!(g.hidden_instance().unwrap().0.param_count(), 9);
    }
}
