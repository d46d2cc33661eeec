use std::collections::HashMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use treeprep_core::optimizer::random_partition;

#[test]
fn singleton_blocks_give_uniform_permutations() {
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    let n = 10_000;
    for s in 0..n {
        let p = random_partition(4, 1, s).unwrap();
        *counts.entry(p.blocks().concat()).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let expected = n as f64 / 24.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = 1.0 - ChiSquared::new(23.0).unwrap().cdf(chi2);
    assert!(p_value > 1e-3, "chi2={chi2} p={p_value}");
}

#[test]
fn full_block_size_is_one_block() {
    let p = random_partition(7, 7, 1).unwrap();
    assert_eq!(p.blocks(), &[(0..7).collect::<Vec<_>>()]);
}
