use rand::Rng;
use rand_distr::StandardNormal;
use treeprep_core::acquisition::{
    candidate_set, expected_improvement, propose_next, select_candidate, ucb_score,
    AcquisitionConfig, AcquisitionKind, Kappa, SearchBox,
};
use treeprep_core::circuit::ParameterVector;
use treeprep_core::seed;
use treeprep_core::surrogate::{Surrogate, UncertainPrediction};

fn pred(mean: f64, std: f64) -> UncertainPrediction {
    UncertainPrediction { mean, std, floor_applied: false, tree_mean: mean }
}

#[test]
fn closed_form_matches_monte_carlo() {
    let mut rng = seed::rng(17);
    for _ in 0..50 {
        let mu = rng.random_range(-1.0..1.0);
        let s = rng.random_range(0.01..1.0);
        let f_best = rng.random_range(-1.0..1.0);
        let n = 1_000_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            let v = (f_best - (mu + s * z)).max(0.0);
            sum += v;
            sq += v * v;
        }
        let mean = sum / n as f64;
        let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
        let ei = expected_improvement(&pred(mu, s), f_best);
        assert!((ei - mean).abs() <= 3.0 * se + 1e-12, "mu={mu} s={s} f={f_best}: {ei} vs {mean} ± {se}");
    }
}

#[test]
fn zero_spread_is_exact() {
    assert_eq!(expected_improvement(&pred(0.3, 0.0), 0.5), 0.2);
    assert_eq!(expected_improvement(&pred(0.7, 0.0), 0.5), 0.0);
    assert_eq!(expected_improvement(&pred(0.5, 0.0), 0.5), 0.0);
}

/// Surrogate whose mean and spread are analytic functions of the point.
struct Analytic;

impl Surrogate for Analytic {
    fn predict(&self, x: &[f64]) -> UncertainPrediction {
        pred((x[0] - 2.0).powi(2), 0.1 + 0.05 * x[0])
    }
}

#[test]
fn selection_is_grid_argmax() {
    let grid: Vec<Vec<f64>> = (0..=600).map(|i| vec![i as f64 * 0.01]).collect();
    let cfg = AcquisitionConfig::default();
    let i = select_candidate(&Analytic, &grid, &cfg, 0.2, 10);
    let scores: Vec<f64> = grid.iter().map(|x| expected_improvement(&Analytic.predict(x), 0.2)).collect();
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(scores[i], best);
    assert_eq!(scores.iter().position(|&v| v == best), Some(i));
}

#[test]
fn ucb_argmin_shift_invariant() {
    struct Shifted(f64);
    impl Surrogate for Shifted {
        fn predict(&self, x: &[f64]) -> UncertainPrediction {
            pred((x[0] - 1.0).powi(2) + self.0, 0.2 * x[0].sin().abs())
        }
    }
    let mut rng = seed::rng(3);
    let c: Vec<Vec<f64>> = (0..300).map(|_| vec![rng.random_range(0.0..6.0)]).collect();
    let cfg = AcquisitionConfig { kind: AcquisitionKind::Ucb, kappa: Kappa::Fixed(1.5), ..Default::default() };
    assert_eq!(
        select_candidate(&Shifted(0.0), &c, &cfg, 0.0, 5),
        select_candidate(&Shifted(12.5), &c, &cfg, 0.0, 5)
    );
    let k = 1e9;
    let i = (0..c.len())
        .min_by(|&a, &b| ucb_score(&Shifted(0.0).predict(&c[a]), k).total_cmp(&ucb_score(&Shifted(0.0).predict(&c[b]), k)))
        .unwrap();
    let j = (0..c.len())
        .max_by(|&a, &b| Shifted(0.0).predict(&c[a]).std.total_cmp(&Shifted(0.0).predict(&c[b]).std))
        .unwrap();
    assert_eq!(Shifted(0.0).predict(&c[i]).std, Shifted(0.0).predict(&c[j]).std);
}

#[test]
fn candidates_respect_block_and_range() {
    let center = ParameterVector::new(vec![0.1, 6.2, 3.0, 1.0]);
    let block = [1, 2];
    let domain = SearchBox { center: &center, block: &block };
    let cfg = AcquisitionConfig { n_candidates: 101, ..Default::default() };
    let c = candidate_set(&domain, &cfg, 9);
    assert_eq!(c.len(), 101);
    assert!(c.iter().flatten().all(|v| (0.0..std::f64::consts::TAU).contains(v)));
    assert_eq!(c, candidate_set(&domain, &cfg, 9));
    let p = propose_next(&Analytic, &domain, &cfg, 0.5, 4, 9).unwrap();
    assert_eq!(p.as_slice()[0], 0.1);
    assert_eq!(p.as_slice()[3], 1.0);
}

#[test]
fn identical_candidates_return_that_point() {
    let center = ParameterVector::new(vec![1.25]);
    let domain = SearchBox { center: &center, block: &[0] };
    for kind in [AcquisitionKind::Ei, AcquisitionKind::Ucb] {
        let cfg = AcquisitionConfig { kind, n_candidates: 1, ..Default::default() };
        let only = candidate_set(&domain, &cfg, 5);
        let p = propose_next(&Analytic, &domain, &cfg, 0.0, 3, 5).unwrap();
        assert_eq!(p.as_slice(), only[0].as_slice());
    }
}
