//! Convergence diagnostics computed from a run's query sequence.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::circuit::euclidean;
use crate::error::{Error, Result};
use crate::optimizer::RunResult;
use crate::seed;
use crate::surrogate::{variance_floor_eta, EvaluationDataset};
use rand::Rng;

const MAX_CORNER_DIM: usize = 16;

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().take_while(|p| *p * *p <= c).all(|p| !c.is_multiple_of(*p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Deterministic probe set over `[0, 2π]^d`: the box corners (for `d ≤ 16`)
/// followed by `resolution` Halton points with a seeded Cranley–Patterson shift.
pub fn probe_set(dim: usize, resolution: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut probes = Vec::new();
    if dim <= MAX_CORNER_DIM {
        for mask in 0u64..(1u64 << dim) {
            probes.push(
                (0..dim)
                    .map(|k| if mask >> k & 1 == 1 { TAU } else { 0.0 })
                    .collect(),
            );
        }
    }
    let primes = first_primes(dim);
    let mut rng = seed::rng(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    for i in 1..=resolution as u64 {
        probes.push(
            primes
                .iter()
                .zip(&shift)
                .map(|(&b, &s)| (radical_inverse(i, b) + s).fract() * TAU)
                .collect(),
        );
    }
    probes
}

/// Incrementally maintained covering-radius estimate over a fixed probe set.
pub struct CoveringTracker {
    probes: Vec<Vec<f64>>,
    nearest: Vec<f64>,
}

impl CoveringTracker {
    pub fn new(dim: usize, resolution: usize, seed: u64) -> Self {
        let probes = probe_set(dim, resolution, seed);
        let nearest = vec![f64::INFINITY; probes.len()];
        CoveringTracker { probes, nearest }
    }

    pub fn add(&mut self, point: &[f64]) -> f64 {
        for (p, n) in self.probes.iter().zip(self.nearest.iter_mut()) {
            let d = euclidean(p, point);
            if d < *n {
                *n = d;
            }
        }
        self.radius()
    }

    /// Largest probe-to-nearest-point distance; a lower bound on the true sup.
    pub fn radius(&self) -> f64 {
        self.nearest.iter().copied().fold(0.0, f64::max)
    }
}

/// Estimate of `sup_θ min_i ‖θ − θ_i‖₂` over the angle box.
pub fn covering_radius(points: &[Vec<f64>], resolution: usize, seed: u64) -> Result<f64> {
    let first = points.first().ok_or(Error::Empty("point set"))?;
    let mut tr = CoveringTracker::new(first.len(), resolution, seed);
    for p in points {
        tr.add(p);
    }
    Ok(tr.radius())
}

/// `ρ_t` for every prefix of the query sequence.
pub fn covering_curve(points: &[Vec<f64>], resolution: usize, seed: u64) -> Result<Vec<f64>> {
    let first = points.first().ok_or(Error::Empty("point set"))?;
    let mut tr = CoveringTracker::new(first.len(), resolution, seed);
    Ok(points.iter().map(|p| tr.add(p)).collect())
}

/// Volume of the unit ball in `R^d`, `π^{d/2} / Γ(1 + d/2)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma(1.0 + d as f64 / 2.0)
}

/// `(C_d D^d / t)^{1/d}`.
pub fn packing_bound(t: usize, d: usize, diameter: f64) -> Result<f64> {
    if t == 0 || d == 0 || diameter.is_nan() || diameter <= 0.0 {
        return Err(Error::invalid("packing bound needs t >= 1, d >= 1, D > 0"));
    }
    Ok((unit_ball_volume(d) * diameter.powi(d as i32) / t as f64).powf(1.0 / d as f64))
}

/// Diameter of `[0, 2π]^d`.
pub fn box_diameter(d: usize) -> f64 {
    TAU * (d as f64).sqrt()
}

/// Greedy farthest-point sequence over a probe set (a low-dispersion reference).
pub fn farthest_point_sequence(dim: usize, count: usize, resolution: usize, seed: u64) -> Vec<Vec<f64>> {
    let candidates = probe_set(dim, resolution, seed);
    let mut nearest = vec![f64::INFINITY; candidates.len()];
    let mut out = Vec::with_capacity(count);
    let mut next = vec![PI; dim];
    for _ in 0..count {
        for (c, n) in candidates.iter().zip(nearest.iter_mut()) {
            *n = n.min(euclidean(c, &next));
        }
        out.push(next);
        let (i, _) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        next = candidates[i].clone();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    /// `f(θ_t) − f⋆` for every query.
    pub instantaneous: Vec<f64>,
    /// `min_{i≤t} f(θ_i) − f⋆`.
    pub best_so_far: Vec<f64>,
    /// Least-squares slope of `log r` against `log t` over the second half.
    pub exponent: Option<f64>,
}

/// Slope of `log values[t-1]` against `log t` over the second half of the
/// sequence, skipping non-positive entries.
pub fn fit_rate_exponent(values: &[f64]) -> Option<f64> {
    let start = values.len() / 2;
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .skip(start)
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| (((i + 1) as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Loss values used for regret: noise-free where recorded, else observed.
fn true_losses(data: &EvaluationDataset) -> Vec<f64> {
    data.records()
        .iter()
        .map(|r| r.f_exact.unwrap_or(r.y))
        .collect()
}

pub fn regret_curve_of(data: &EvaluationDataset, f_star: f64) -> Result<RegretCurve> {
    if data.len() < 4 {
        return Err(Error::invalid("regret curve needs at least 4 iterations"));
    }
    let instantaneous: Vec<f64> = true_losses(data).into_iter().map(|f| f - f_star).collect();
    let mut b = f64::INFINITY;
    let best_so_far: Vec<f64> = instantaneous
        .iter()
        .map(|&r| {
            b = b.min(r);
            b
        })
        .collect();
    let exponent = fit_rate_exponent(&best_so_far);
    Ok(RegretCurve {
        instantaneous,
        best_so_far,
        exponent,
    })
}

pub fn regret_curve(result: &RunResult, f_star: f64) -> Result<RegretCurve> {
    regret_curve_of(&result.dataset, f_star)
}

/// Mean noise-free loss over the last `tail` queries.
pub fn tail_mean(data: &EvaluationDataset, tail: usize) -> f64 {
    let f = true_losses(data);
    let k = tail.clamp(1, f.len().max(1));
    f[f.len() - k..].iter().sum::<f64>() / k as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseGapRow {
    pub sigma: f64,
    pub runs: usize,
    pub mean_tail: f64,
    pub max_tail: f64,
    /// Runs whose tail mean is at most `f⋆ + σ + slack`.
    pub within: usize,
}

/// Tail-mean loss per noise level against the `f⋆ + σ` limit.
pub fn noise_gap_check(
    groups: &[(f64, Vec<&EvaluationDataset>)],
    f_star: f64,
    tail: usize,
    slack: f64,
) -> Vec<NoiseGapRow> {
    groups
        .iter()
        .map(|(sigma, runs)| {
            let tails: Vec<f64> = runs.iter().map(|d| tail_mean(d, tail)).collect();
            let n = tails.len().max(1) as f64;
            NoiseGapRow {
                sigma: *sigma,
                runs: tails.len(),
                mean_tail: tails.iter().sum::<f64>() / n,
                max_tail: tails.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                within: tails
                    .iter()
                    .filter(|&&t| t <= f_star + sigma + slack)
                    .count(),
            }
        })
        .collect()
}

/// `max |Δf| / ‖Δθ‖` over all pairs, a lower bound on the Lipschitz constant.
pub fn lipschitz_lower_bound(data: &EvaluationDataset) -> f64 {
    let f = true_losses(data);
    let r = data.records();
    let mut best: f64 = 0.0;
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            let d = r[i].theta.distance(&r[j].theta);
            if d > 0.0 {
                best = best.max((f[i] - f[j]).abs() / d);
            }
        }
    }
    best
}

/// Largest `|y − f|` among records that carry the noise-free loss.
pub fn noise_bound_estimate(data: &EvaluationDataset) -> Option<f64> {
    data.records()
        .iter()
        .filter_map(|r| r.f_exact.map(|f| (r.y - f).abs()))
        .reduce(f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsOptions {
    pub resolution: usize,
    pub seed: u64,
    pub f_star: Option<f64>,
    pub learning_rate: f64,
    pub max_trees: usize,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        DiagnosticsOptions {
            resolution: 10_000,
            seed: 0,
            f_star: None,
            learning_rate: 0.1,
            max_trees: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub covering_radius: Vec<f64>,
    pub packing_bound: Vec<f64>,
    pub eta: Vec<f64>,
    pub regret: Option<RegretCurve>,
    pub lipschitz_lower_bound: f64,
    pub noise_bound: Option<f64>,
}

impl DiagnosticsReport {
    pub fn from_dataset(data: &EvaluationDataset, opts: &DiagnosticsOptions) -> Result<Self> {
        let points: Vec<Vec<f64>> = data
            .records()
            .iter()
            .map(|r| r.theta.as_slice().to_vec())
            .collect();
        let d = data.dim();
        let covering_radius = covering_curve(&points, opts.resolution, opts.seed)?;
        let diameter = box_diameter(d);
        let packing = (1..=points.len())
            .map(|t| packing_bound(t, d, diameter))
            .collect::<Result<Vec<_>>>()?;
        let ys = data.ys();
        let eta = (1..=ys.len())
            .map(|t| variance_floor_eta(&ys[..t], opts.learning_rate, opts.max_trees))
            .collect();
        let regret = match opts.f_star {
            Some(f) if data.len() >= 4 => Some(regret_curve_of(data, f)?),
            _ => None,
        };
        Ok(DiagnosticsReport {
            covering_radius,
            packing_bound: packing,
            eta,
            regret,
            lipschitz_lower_bound: lipschitz_lower_bound(data),
            noise_bound: noise_bound_estimate(data),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        let b = packing_bound(1, 2, 1.0).unwrap();
        assert!((b - 1.772_453_850_905_516).abs() < 1e-12);
        assert!(packing_bound(0, 2, 1.0).is_err());
        assert!(packing_bound(1, 0, 1.0).is_err());
        assert!(packing_bound(1, 2, 0.0).is_err());
    }

    #[test]
    fn center_point_radius() {
        let r = covering_radius(&[vec![PI, PI]], 100_000, 0).unwrap();
        assert!((r - 2f64.sqrt() * PI).abs() / (2f64.sqrt() * PI) < 0.01);
        assert!(covering_radius(&[], 10, 0).is_err());
    }

    #[test]
    fn rate_exponent_of_power_law() {
        let v: Vec<f64> = (1..=400).map(|t| (t as f64).powf(-0.5)).collect();
        assert!((fit_rate_exponent(&v).unwrap() + 0.5).abs() < 1e-10);
        assert_eq!(fit_rate_exponent(&[0.3; 50]).unwrap(), 0.0);
    }

    #[test]
    fn halton_radical_inverse() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
    }
}
