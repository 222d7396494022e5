//! Seed derivation for independent, order-free random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator every random routine in the crate is driven by.
pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of indices (grid point, trial, ...) into a
/// child seed. Children of distinct paths are decorrelated, and the result
/// does not depend on the order in which children are requested.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
