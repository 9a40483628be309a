//! Seed derivation.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream whose seed
//! is a hash of the master seed and a path of integer tags (tree index,
//! replicate, grid point, role). Streams never depend on scheduling, so
//! parallel and sequential runs draw identical numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha8Rng;

/// Tags distinguishing the roles a stream can play under one master seed.
pub mod tag {
    pub const TREE: u64 = 0x7472_6565;
    pub const TRAIN: u64 = 0x0074_726e;
    pub const TEST: u64 = 0x7465_7374;
    pub const SPLIT_SAMPLE: u64 = 0x7370_6c74;
    pub const FOREST: u64 = 0x666f_7273;
    pub const QUERY: u64 = 0x7175_6572;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes `seed` together with `path` into a new 64-bit seed.
pub fn derive(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive(seed, path))
}

/// Standard normal draw (ziggurat).
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
