//! Seed derivation and region sampling shared by the classifier stages.
//!
//! Every stage derives its own stream from the user seed and a fixed role
//! tag, so adding or reordering stages never changes the draws seen by the
//! others, and reruns with the same seed are bit-reproducible.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sampled_map::DiskRegion;

/// Role tags for the per-stage derived streams.
pub(crate) mod role {
    pub const PROBE: u64 = 1;
    pub const PHI_TETRADS: u64 = 2;
    pub const MIDPOINT: u64 = 3;
    pub const CIRCLES: u64 = 4;
    pub const FIT: u64 = 5;
    pub const MAP_SAMPLES: u64 = 6;
}

/// SplitMix64 finalizer; mixes a role tag into a user seed.
pub(crate) fn mix(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic generator for one classifier stage.
pub(crate) fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, tag))
}

/// Uniform draw from a closed disk (by area).
pub(crate) fn draw_in_disk(rng: &mut ChaCha8Rng, region: &DiskRegion) -> Complex64 {
    let r = region.radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    region.center + Complex64::from_polar(r, theta)
}
