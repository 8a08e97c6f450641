use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent child seed: the first word of ChaCha stream `stream` under
/// key `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    rng_for(seed, stream).next_u64()
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
