//! Sub-seeds for benchmark trials.
//!
//! Trial `t` of the cell with sparsity `k1` uses
//! `mix(mix(mix(master) ^ k1) ^ t)`, where `mix` is the SplitMix64 finalizer
//! applied after adding the golden-ratio increment. The seed depends only on
//! `(master, k1, t)`, so the order in which cells run is irrelevant.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, k1: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ k1 as u64) ^ trial as u64)
}
