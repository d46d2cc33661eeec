use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Tolerance on `Σ p = 1` for user-supplied exact distributions.
pub const SUM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionKind {
    Exact,
    /// Shot histogram; `probs[i] == counts[i] / shots`.
    Empirical { counts: Vec<u64>, shots: u64 },
}

/// Probability vector over `2^n` computational basis outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityDistribution {
    probs: Vec<f64>,
    kind: DistributionKind,
}

impl ProbabilityDistribution {
    pub fn exact(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("probability vector"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("probabilities must be finite and non-negative"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self::from_exact_unchecked(probs))
    }

    pub(crate) fn from_exact_unchecked(probs: Vec<f64>) -> Self {
        ProbabilityDistribution {
            probs,
            kind: DistributionKind::Exact,
        }
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let shots: u64 = counts.iter().sum();
        if counts.is_empty() || shots == 0 {
            return Err(Error::Empty("shot histogram"));
        }
        let probs = counts.iter().map(|&c| c as f64 / shots as f64).collect();
        Ok(ProbabilityDistribution {
            probs,
            kind: DistributionKind::Empirical { counts, shots },
        })
    }

    pub fn uniform(len: usize) -> Self {
        Self::from_exact_unchecked(vec![1.0 / len as f64; len])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn shots(&self) -> Option<u64> {
        match self.kind {
            DistributionKind::Empirical { shots, .. } => Some(shots),
            DistributionKind::Exact => None,
        }
    }

    pub fn counts(&self) -> Option<&[u64]> {
        match &self.kind {
            DistributionKind::Empirical { counts, .. } => Some(counts),
            DistributionKind::Exact => None,
        }
    }
}

/// Draw a multinomial shot histogram from `p`.
///
/// Uses the conditional-binomial decomposition, so the result is a pure
/// function of `(p, shots, seed)`.
pub fn sample_shots(
    p: &ProbabilityDistribution,
    shots: u64,
    seed: u64,
) -> Result<ProbabilityDistribution> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let probs = p.probs();
    let last = probs
        .iter()
        .rposition(|&x| x > 0.0)
        .ok_or(Error::Empty("distribution has no mass"))?;
    let mut rng = seed::rng(seed);
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass: f64 = probs[..=last].iter().sum();
    for i in 0..last {
        if remaining == 0 {
            break;
        }
        let pi = probs[i];
        if pi > 0.0 {
            let cond = (pi / mass).clamp(0.0, 1.0);
            let k = Binomial::new(remaining, cond)
                .expect("conditional probability in [0, 1]")
                .sample(&mut rng);
            counts[i] = k;
            remaining -= k;
        }
        mass -= pi;
        if mass <= 0.0 {
            break;
        }
    }
    counts[last] += remaining;
    ProbabilityDistribution::from_counts(counts)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Total variation distance `½ Σ |p(x) − q(x)|`.
///
/// Two shot histograms are compared in exact integer arithmetic and rounded
/// once, so rational inputs give the correctly rounded result.
pub fn tvd(p: &ProbabilityDistribution, q: &ProbabilityDistribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    if let (
        DistributionKind::Empirical { counts: a, shots: sa },
        DistributionKind::Empirical { counts: b, shots: sb },
    ) = (&p.kind, &q.kind)
    {
        let (sa, sb) = (*sa as u128, *sb as u128);
        let num: u128 = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (x as u128 * sb).abs_diff(y as u128 * sa))
            .sum();
        let den = 2 * sa * sb;
        let g = gcd(num, den).max(1);
        return Ok((num / g) as f64 / (den / g) as f64);
    }
    let s: f64 = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * s).min(1.0))
}
