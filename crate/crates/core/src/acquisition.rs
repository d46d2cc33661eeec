//! Acquisition scores (expected improvement, lower confidence bound) and
//! candidate-set maximization over an axis-aligned search sub-box.

use std::f64::consts::{SQRT_2, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::circuit::{wrap_angle, ParameterVector};
use crate::error::{Error, Result};
use crate::seed;
use crate::surrogate::{Surrogate, UncertainPrediction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcquisitionKind {
    Ei,
    Ucb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kappa {
    Fixed(f64),
    /// `√(2 ln t)`.
    Schedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AcquisitionConfig {
    pub kind: AcquisitionKind,
    pub kappa: Kappa,
    pub n_candidates: usize,
    /// Standard deviation (radians) of incumbent perturbations.
    pub sigma_prop: f64,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        AcquisitionConfig {
            kind: AcquisitionKind::Ei,
            kappa: Kappa::Schedule,
            n_candidates: 512,
            sigma_prop: 0.25,
        }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_candidates == 0 {
            return Err(Error::invalid("candidate budget must be at least 1"));
        }
        if self.sigma_prop.is_nan() || self.sigma_prop <= 0.0 {
            return Err(Error::invalid("sigma_prop must be positive"));
        }
        if let Kappa::Fixed(k) = self.kappa {
            if k.is_nan() || k <= 0.0 {
                return Err(Error::invalid("fixed kappa must be positive"));
            }
        }
        Ok(())
    }

    pub fn kappa_at(&self, t: usize) -> f64 {
        match self.kappa {
            Kappa::Fixed(k) => k,
            Kappa::Schedule => kappa_schedule(t),
        }
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (TAU).sqrt()
}

/// `E[max(f_best − X, 0)]` for `X ~ N(mean, std²)`.
pub fn expected_improvement(pred: &UncertainPrediction, f_best: f64) -> f64 {
    let gap = f_best - pred.mean;
    if pred.std <= 0.0 {
        return gap.max(0.0);
    }
    let z = gap / pred.std;
    (gap * std_normal_cdf(z) + pred.std * std_normal_pdf(z)).max(0.0)
}

/// Empirical expected improvement over predictive samples.
pub fn empirical_expected_improvement(samples: &[f64], f_best: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|&v| (f_best - v).max(0.0)).sum::<f64>() / samples.len() as f64
}

/// Lower confidence bound `μ − κ s`; smaller is better.
pub fn ucb_score(pred: &UncertainPrediction, kappa: f64) -> f64 {
    pred.mean - kappa * pred.std
}

/// `√(2 ln t)`, with `t < 2` treated as `t = 2`.
pub fn kappa_schedule(t: usize) -> f64 {
    (2.0 * (t.max(2) as f64).ln()).sqrt()
}

/// Active coordinates of the search: every candidate agrees with `center`
/// off `block`.
#[derive(Debug, Clone)]
pub struct SearchBox<'a> {
    pub center: &'a ParameterVector,
    pub block: &'a [usize],
}

/// Candidate block coordinates: `⌈N/2⌉` uniform draws over the active box,
/// then Gaussian perturbations of the center, wrapped into `[0, 2π)`.
pub fn candidate_set(domain: &SearchBox<'_>, cfg: &AcquisitionConfig, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seed::rng(seed);
    let n = cfg.n_candidates;
    let n_uniform = n.div_ceil(2);
    let base = domain.center.project(domain.block);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n_uniform {
        out.push(
            (0..domain.block.len())
                .map(|_| rng.random_range(0.0..TAU))
                .collect(),
        );
    }
    for _ in n_uniform..n {
        out.push(
            base.iter()
                .map(|&c| {
                    let z: f64 = rng.sample(StandardNormal);
                    wrap_angle(c + cfg.sigma_prop * z)
                })
                .collect(),
        );
    }
    out
}

/// Index of the winning candidate (max EI or min UCB, earliest on ties).
pub fn select_candidate(
    model: &dyn Surrogate,
    candidates: &[Vec<f64>],
    cfg: &AcquisitionConfig,
    f_best: f64,
    t: usize,
) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    let kappa = cfg.kappa_at(t);
    for (i, c) in candidates.iter().enumerate() {
        let score = match cfg.kind {
            AcquisitionKind::Ei => match model.empirical_samples(c) {
                Some(s) => empirical_expected_improvement(&s, f_best),
                None => expected_improvement(&model.predict(c), f_best),
            },
            AcquisitionKind::Ucb => -ucb_score(&model.predict(c), kappa),
        };
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    best
}

/// Next query point within `domain`.
///
/// `t` is the current dataset size (drives the κ schedule).
pub fn propose_next(
    model: &dyn Surrogate,
    domain: &SearchBox<'_>,
    cfg: &AcquisitionConfig,
    f_best: f64,
    t: usize,
    seed: u64,
) -> Result<ParameterVector> {
    if domain.block.is_empty() {
        return Err(Error::Empty("search block"));
    }
    cfg.validate()?;
    let candidates = candidate_set(domain, cfg, seed);
    let i = select_candidate(model, &candidates, cfg, f_best, t);
    Ok(domain.center.with_block(domain.block, &candidates[i]))
}
