//! Seeded randomness.
//!
//! Every random draw in the crate comes from [`Pcg64`] (PCG XSL 128/64,
//! `rand_pcg`), whose output stream is fixed by its seed on every platform.
//! Derived streams are keyed with SplitMix64 so that one user seed can drive
//! many independent generators (per graph, per attempt, per epoch shuffle).

use rand::SeedableRng;
use rand_pcg::Pcg64;

pub type Rng = Pcg64;

pub fn from_seed(seed: u64) -> Rng {
    Pcg64::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `stream`-th child of `seed`.
pub fn derive(seed: u64, stream: u64) -> u64 {
    mix(seed ^ mix(stream.wrapping_add(0x5851_F42D_4C95_7F2D)))
}
