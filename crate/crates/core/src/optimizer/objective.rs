use rand::Rng;

use crate::circuit::{
    sample_shots, simulate, tvd, AnsatzSpec, ParameterVector, ProbabilityDistribution,
};
use crate::error::{Error, Result};
use crate::seed::{self, Stream};
use crate::targets::{ReferenceMode, TargetSpec};

/// One loss observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub y: f64,
    /// Noise-free loss, when the objective can compute it.
    pub f_exact: Option<f64>,
    pub shots: u64,
}

/// Black-box loss over `[0, 2π)^d`.
///
/// `eval_index` is the global position of the evaluation in the run; any
/// randomness must be derived from it so results do not depend on scheduling.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn evaluate(&self, theta: &ParameterVector, eval_index: u64) -> Result<Observation>;
}

/// TVD between the ansatz output and a target's reference distribution.
#[derive(Debug, Clone)]
pub struct StatePrepObjective {
    spec: AnsatzSpec,
    reference: ProbabilityDistribution,
    exact_target: ProbabilityDistribution,
    shots: Option<u64>,
    noise: Option<f64>,
    master_seed: u64,
}

impl StatePrepObjective {
    pub fn new(
        target: &TargetSpec,
        spec: &AnsatzSpec,
        reference: ReferenceMode,
        shots: Option<u64>,
        noise: Option<f64>,
        master_seed: u64,
    ) -> Result<Self> {
        if target.n_qubits() != spec.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: target.n_qubits(),
                found: spec.n_qubits(),
            });
        }
        if shots == Some(0) {
            return Err(Error::invalid("shots per evaluation must be at least 1"));
        }
        if let Some(s) = noise {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::invalid("noise level must be finite and non-negative"));
            }
        }
        Ok(StatePrepObjective {
            spec: spec.clone(),
            reference: target.reference(reference)?,
            exact_target: target.exact_distribution().clone(),
            shots,
            noise,
            master_seed,
        })
    }

    pub fn spec(&self) -> &AnsatzSpec {
        &self.spec
    }

    pub fn exact_loss(&self, theta: &ParameterVector) -> Result<f64> {
        let p = simulate(&self.spec, theta)?.distribution();
        tvd(&p, &self.exact_target)
    }
}

impl Objective for StatePrepObjective {
    fn dim(&self) -> usize {
        self.spec.param_count()
    }

    fn evaluate(&self, theta: &ParameterVector, eval_index: u64) -> Result<Observation> {
        let p = simulate(&self.spec, theta)?.distribution();
        let f_exact = tvd(&p, &self.exact_target)?;
        let mut y = match self.shots {
            None => tvd(&p, &self.reference)?,
            Some(k) => {
                let s = seed::stream_seed(self.master_seed, Stream::Shots, &[eval_index]);
                tvd(&sample_shots(&p, k, s)?, &self.reference)?
            }
        };
        if let Some(sigma) = self.noise.filter(|s| *s > 0.0) {
            let s = seed::stream_seed(self.master_seed, Stream::Noise, &[eval_index]);
            y += seed::rng(s).random_range(-sigma..=sigma);
        }
        Ok(Observation {
            y,
            f_exact: Some(f_exact),
            shots: self.shots.unwrap_or(0),
        })
    }
}

/// Single loss evaluation of `theta` against `target`'s exact distribution.
pub fn evaluate_loss(
    target: &TargetSpec,
    spec: &AnsatzSpec,
    theta: &ParameterVector,
    shots: Option<u64>,
    seed: u64,
) -> Result<f64> {
    let obj = StatePrepObjective::new(target, spec, ReferenceMode::Exact, shots, None, seed)?;
    Ok(obj.evaluate(theta, 0)?.y)
}
