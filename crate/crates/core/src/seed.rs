//! Seed derivation for sample paths and experiment phases.
//!
//! Everything random in the crate is driven by [`SimRng`] instances seeded
//! from 64-bit values produced here, so a run is a pure function of its
//! master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG used for every exogenous draw. ChaCha8 has a stable, platform
/// independent stream for a given seed.
pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer applied to `x + golden gamma`. A bijection on `u64`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample path `index` under `master`.
///
/// `child_seed(m, i) = splitmix64(m ^ splitmix64(i))`. For a fixed master the
/// map is injective in `index`, so the paths of one evaluation never share a
/// seed.
pub fn child_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Tags separating the seed streams of the different experiment phases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum SeedDomain {
    /// Objective evaluations inside stochastic search iterations.
    Tune = 1,
    /// Rademacher perturbation directions.
    Perturb = 2,
    /// Fixed path set used to pick the best tuning iterate.
    Select = 3,
    /// Held-out paths for final comparisons.
    Validate = 4,
    /// Plain simulation runs.
    Simulate = 5,
}

/// Master seed for item `index` of `domain`.
///
/// The pre-image `(domain << 56) | index` is distinct for distinct
/// `(domain, index)` pairs while `index < 2^56`; mixing with a bijection keeps
/// them distinct, so different domains never hand out the same master seed
/// for a given experiment seed.
pub fn domain_seed(experiment: u64, domain: SeedDomain, index: u64) -> u64 {
    debug_assert!(index < 1 << 56);
    let tagged = ((domain as u64) << 56) | (index & ((1 << 56) - 1));
    splitmix64(splitmix64(experiment) ^ tagged)
}

/// RNG seeded from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
