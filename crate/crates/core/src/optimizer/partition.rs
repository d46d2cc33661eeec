use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::circuit::AnsatzSpec;
use crate::error::{Error, Result};
use crate::seed;

/// Ordered, disjoint blocks of parameter indices covering `0..d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerPartition {
    blocks: Vec<Vec<usize>>,
}

impl LayerPartition {
    pub fn new(d: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; d];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::invalid("partition blocks must be non-empty"));
            }
            for &i in b {
                if i >= d || seen[i] {
                    return Err(Error::invalid(format!(
                        "index {i} out of range or repeated in partition"
                    )));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("partition does not cover every index"));
        }
        Ok(LayerPartition { blocks })
    }

    /// One block holding every index.
    pub fn single(d: usize) -> Self {
        LayerPartition {
            blocks: vec![(0..d).collect()],
        }
    }

    /// One block per ansatz layer.
    pub fn layerwise(spec: &AnsatzSpec) -> Self {
        LayerPartition {
            blocks: (0..spec.n_layers())
                .map(|l| spec.layer_range(l).collect())
                .collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Blocks of `block_size` consecutive entries of a uniformly random
/// permutation of `0..d`; the last block may be smaller. Indices inside a
/// block are sorted.
pub fn random_partition(d: usize, block_size: usize, seed: u64) -> Result<LayerPartition> {
    if block_size == 0 || block_size > d {
        return Err(Error::invalid(format!(
            "block size {block_size} outside [1, {d}]"
        )));
    }
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(&mut seed::rng(seed));
    let blocks = perm
        .chunks(block_size)
        .map(|c| {
            let mut b = c.to_vec();
            b.sort_unstable();
            b
        })
        .collect();
    Ok(LayerPartition { blocks })
}
