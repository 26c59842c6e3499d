//! Deterministic per-stream seed derivation.
//!
//! Every replica owns an independent ChaCha8 stream whose seed is a pure
//! function of `(master_seed, domain, repetition, index)`, so results do not
//! depend on how replicas are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domains, kept apart so that e.g. the initial-condition draw never
/// shares randomness with replica 0.
pub mod domain {
    pub const INITIAL_CONDITION: u64 = 0x11;
    pub const REPLICA: u64 = 0x22;
    pub const DIAGNOSTIC: u64 = 0x33;
    pub const PATH_EVENT: u64 = 0x44;
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_seed(master: u64, domain: u64, repetition: u64, index: u64) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ domain);
    h = splitmix64(h ^ repetition);
    splitmix64(h ^ index)
}

pub fn stream_rng(master: u64, domain: u64, repetition: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, domain, repetition, index))
}
