//! The one deterministic random generator used across the crate.
//!
//! Frozen choice: ChaCha8 from `rand_chacha` 0.3, seeded with
//! `SeedableRng::seed_from_u64`. Field elements come from rejection
//! sampling on `next_u64`, reals in `[0, 1)` from the top 53 bits. Share
//! files and reports are golden-tested against this exact stream.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `0..bound`.
pub fn below(rng: &mut SeededRng, bound: u64) -> u64 {
    assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

/// Uniform real in `[0, 1)`.
pub fn unit(rng: &mut SeededRng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
