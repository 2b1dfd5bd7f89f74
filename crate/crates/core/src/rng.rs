//! The project-wide deterministic generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for item `index` of a batch seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Child generator drawn from a parent, for splitting one trip's randomness
/// into per-process streams.
pub fn child(parent: &mut SeededRng) -> SeededRng {
    use rand::RngCore;
    ChaCha8Rng::seed_from_u64(parent.next_u64())
}
