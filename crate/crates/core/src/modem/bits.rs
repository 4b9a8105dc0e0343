use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pseudorandom bits (0/1), reproducible from `seed`.
pub fn generate_bits(seed: u64, count: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let word: u64 = rng.random();
        let take = (count - out.len()).min(64);
        out.extend((0..take).map(|k| ((word >> k) & 1) as u8));
    }
    out
}
