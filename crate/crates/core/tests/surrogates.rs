use proptest::prelude::*;
use rand::Rng;
use treeprep_core::surrogate::{
    empirical_quantile, fit_gbrt, fit_qrf, variance_floor_eta, GbrtParams, GbrtSurrogate, QrfParams,
    RegressionTree, Surrogate, TreeParams,
};
use treeprep_core::seed;

/// Exhaustive reference tree: enumerate every midpoint on every feature.
fn brute_predict(x: &[Vec<f64>], y: &[f64], rows: &[usize], depth: usize, p: TreeParams, q: &[f64]) -> f64 {
    let n = rows.len();
    let mean = rows.iter().map(|&i| y[i]).sum::<f64>() / n as f64;
    let sse = |set: &[usize]| {
        let m = set.iter().map(|&i| y[i]).sum::<f64>() / set.len() as f64;
        set.iter().map(|&i| (y[i] - m).powi(2)).sum::<f64>()
    };
    let lo = rows.iter().map(|&i| y[i]).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|&i| y[i]).fold(f64::NEG_INFINITY, f64::max);
    if depth >= p.max_depth || n < 2 * p.min_samples_leaf || lo == hi {
        return mean;
    }
    let parent = sse(rows);
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..x[0].len() {
        let mut vals: Vec<f64> = rows.iter().map(|&i| x[i][f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][f] <= t);
            if l.len() < p.min_samples_leaf || r.len() < p.min_samples_leaf {
                continue;
            }
            let s = sse(&l) + sse(&r);
            if best.is_none_or(|b| s < b.0 - 1e-12 * parent) {
                best = Some((s, f, t));
            }
        }
    }
    match best {
        Some((s, f, t)) if s < parent * (1.0 - 1e-12) => {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][f] <= t);
            let side = if q[f] <= t { l } else { r };
            brute_predict(x, y, &side, depth + 1, p, q)
        }
        _ => mean,
    }
}

#[test]
fn tree_matches_split_enumeration() {
    let mut rng = seed::rng(31);
    for trial in 0..60 {
        let n = rng.random_range(2..25);
        let d = rng.random_range(1..4);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let p = TreeParams { max_depth: rng.random_range(1..4), min_samples_leaf: rng.random_range(1..3) };
        let tree = RegressionTree::fit(&x, &y, p).unwrap();
        let rows: Vec<usize> = (0..n).collect();
        for _ in 0..20 {
            let q: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let a = tree.predict(&q);
            let b = brute_predict(&x, &y, &rows, 0, p, &q);
            assert!((a - b).abs() < 1e-12, "trial {trial}: {a} vs {b}");
        }
    }
}

fn params(n_trees: usize, nu: f64) -> GbrtParams {
    GbrtParams { n_trees, learning_rate: nu, ..GbrtParams::default() }
}

#[test]
fn two_point_recursion() {
    let x = vec![vec![0.0], vec![1.0]];
    let e = fit_gbrt(&x, &[0.0, 1.0], &params(3, 0.5)).unwrap();
    assert_eq!(e.predict(&[0.0]).unwrap(), 0.0625);
    assert_eq!(e.predict(&[1.0]).unwrap(), 0.9375);
    assert_eq!(e.staged_predict(&[0.0]), vec![0.5, 0.25, 0.125, 0.0625]);
}

fn random_data(seed_: u64, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = seed::rng(seed_);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(0.0..6.0)).collect()).collect();
    let y = x.iter().map(|r| r.iter().map(|v| v.sin()).sum::<f64>() + 0.1 * rng.random::<f64>()).collect();
    (x, y)
}

#[test]
fn reconstruction_identity() {
    let (x, y) = random_data(4, 60, 3);
    let e = fit_gbrt(&x, &y, &GbrtParams::default()).unwrap();
    let mut rng = seed::rng(8);
    for _ in 0..1000 {
        let q: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..7.0)).collect();
        let manual = e.base() + e.learning_rate() * e.tree_outputs(&q).iter().sum::<f64>();
        assert!((e.predict(&q).unwrap() - manual).abs() < 1e-12);
    }
}

#[test]
fn training_sse_non_increasing_per_stage() {
    for s in 0..20 {
        let (x, y) = random_data(100 + s, 40, 2);
        let e = fit_gbrt(&x, &y, &params(50, 0.3)).unwrap();
        let staged: Vec<Vec<f64>> = x.iter().map(|r| e.staged_predict(r)).collect();
        let sse = |m: usize| staged.iter().zip(&y).map(|(p, t)| (p[m] - t).powi(2)).sum::<f64>();
        for m in 1..=50 {
            assert!(sse(m) <= sse(m - 1) + 1e-12, "dataset {s} stage {m}");
        }
    }
}

#[test]
fn floor_holds_beyond_delta() {
    let mut rng = seed::rng(77);
    for s in 0..30 {
        let (x, y) = random_data(200 + s, 12, 2);
        let p = GbrtParams::default();
        let model = GbrtSurrogate::fit(x.clone(), &y, &p).unwrap();
        let eta = variance_floor_eta(&y, p.learning_rate, p.n_trees);
        assert!(eta > 0.0);
        let delta = p.floor_fraction * std::f64::consts::TAU * 2f64.sqrt();
        for _ in 0..50 {
            let q: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..6.3)).collect();
            let near = x.iter().map(|r| ((r[0] - q[0]).powi(2) + (r[1] - q[1]).powi(2)).sqrt()).fold(f64::INFINITY, f64::min);
            let pred = model.predict(&q);
            if near > delta {
                assert!(pred.floor_applied);
                assert!(pred.std * pred.std >= eta * (1.0 - 1e-15));
            }
        }
    }
}

#[test]
fn eta_formula() {
    let ys = [0.2, 0.5, 0.9, 0.4];
    let m = ys.iter().sum::<f64>() / 4.0;
    let var = ys.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / 4.0;
    assert_eq!(variance_floor_eta(&ys, 0.1, 100), 0.1 * 0.1 / 100.0 * var);
    assert!((variance_floor_eta(&[0.0, 1.0], 0.1, 100) - 2.5e-5).abs() < 1e-20);
}

#[test]
fn qrf_pools_leaf_samples() {
    let (x, y) = random_data(9, 40, 2);
    let p = QrfParams { n_trees: 1, min_samples_leaf: 40, ..QrfParams::default() };
    let f = fit_qrf(&x, &y, &p, 3).unwrap();
    let pooled = f.pooled_samples(&[1.0, 1.0]);
    assert_eq!(pooled.len(), 40);
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    assert_eq!(f.quantile(0.5, &[1.0, 1.0]), empirical_quantile(&sorted, 0.5));
    let mean = pooled.iter().sum::<f64>() / 40.0;
    assert!((f.predict(&[1.0, 1.0]).mean - mean).abs() < 1e-12);
    for v in &pooled {
        assert!(y.contains(v));
    }
}

#[test]
fn qrf_quantiles_are_monotone() {
    let (x, y) = random_data(10, 60, 3);
    let f = fit_qrf(&x, &y, &QrfParams::default(), 1).unwrap();
    let q = [2.0, 3.0, 1.0];
    let qs: Vec<f64> = [0.1, 0.25, 0.5, 0.75, 0.9].iter().map(|&a| f.quantile(a, &q)).collect();
    assert!(qs.windows(2).all(|w| w[0] <= w[1]));
}

proptest! {
    #[test]
    fn piecewise_constant_predictions(seed_ in 0u64..1000) {
        let (x, y) = random_data(seed_, 15, 1);
        let e = fit_gbrt(&x, &y, &params(10, 0.5)).unwrap();
        let mut knots: Vec<f64> = e.trees().iter().flat_map(|t| t.nodes().iter().filter_map(|n| match n {
            treeprep_core::surrogate::Node::Split { threshold, .. } => Some(*threshold),
            _ => None,
        })).collect();
        knots.push(-1.0);
        knots.push(7.0);
        knots.sort_by(f64::total_cmp);
        for w in knots.windows(2) {
            if w[1] - w[0] > 1e-9 {
                let a = e.predict(&[w[0] + (w[1] - w[0]) * 0.25]).unwrap();
                let b = e.predict(&[w[0] + (w[1] - w[0]) * 0.75]).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }
}
