//! Seeded random number generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random generator used by every randomized algorithm in the crate.
pub type PartRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> PartRng {
    PartRng::seed_from_u64(seed)
}

/// Independent child generator drawn from `rng`.
pub fn derive(rng: &mut PartRng) -> PartRng {
    PartRng::seed_from_u64(rng.gen())
}
