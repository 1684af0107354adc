//! Sub-seed derivation.
//!
//! Every random stream in the simulator is seeded from a 64-bit value derived
//! from the master seed by [`mix`], a SplitMix64 finaliser chain. Alternative
//! implementations reproduce the same streams by applying the same function and
//! seeding ChaCha8 with `seed_from_u64`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `base`, one SplitMix64 round per part.
pub fn mix(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Seed for scenario `scenario_index` of sweep point `sweep_index`.
pub fn scenario_seed(master: u64, sweep_index: u64, scenario_index: u64) -> u64 {
    mix(master, &[sweep_index, scenario_index])
}

/// Stream tags used to split one scenario seed into independent streams.
pub mod stream {
    pub const GEOMETRY: u64 = 0x6E0;
    pub const FADING: u64 = 0xFADE;
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    rng(mix(seed, &[tag]))
}
