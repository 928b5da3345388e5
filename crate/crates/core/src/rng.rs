//! Seeded random streams. Each randomized stage draws from its own stream
//! of the same seed so stages do not perturb one another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ROUNDING_STREAM: u64 = 1;
pub const ROOT_SAMPLING_STREAM: u64 = 2;
pub const GENERATOR_STREAM: u64 = 3;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
