//! Deterministic RNG streams.
//!
//! Every parallel task gets its own stream derived from `(master seed, task index)`,
//! so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of task `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ mix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Seed derived from a master seed and an arbitrary sequence of labels.
pub fn derive_seed_path(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(master), |acc, &p| derive_seed(acc, p))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for task `index` under `master`.
pub fn task_rng(master: u64, index: u64) -> Rng {
    rng_from_seed(derive_seed(master, index))
}
