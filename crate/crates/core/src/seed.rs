//! Deterministic seed derivation.
//!
//! Every random stream in a run is keyed by a tuple of integers (master seed,
//! stream kind, indices) so that results never depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine a base seed with a sequence of stream keys into a new seed.
pub fn derive(base: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(mix(base), |acc, &k| mix(acc ^ mix(k)))
}

/// Stream labels so that different consumers of one master seed never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    WarmUp = 1,
    Shots = 2,
    Proposal = 3,
    Partition = 4,
    Noise = 5,
    Forest = 6,
}

pub fn stream_seed(master: u64, stream: Stream, keys: &[u64]) -> u64 {
    let mut all = Vec::with_capacity(keys.len() + 1);
    all.push(stream as u64);
    all.extend_from_slice(keys);
    derive(master, &all)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
