//! Seed derivation for independent, order-free random streams.
//!
//! Every replicate or draw `i` under a master seed gets its own generator,
//! seeded from `child_seed(master, i)`. Results therefore do not depend on
//! which worker ran which index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `mix64(mix64(master) + golden * (index + 1))`.
pub fn child_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master).wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index.wrapping_add(1))))
}

pub fn child_rng(master: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(child_seed(master, index))
}

/// Separate sub-stream families under one master seed (e.g. the stream
/// and limit halves of a comparison).
pub fn domain_seed(master: u64, domain: &str) -> u64 {
    domain.bytes().fold(mix64(master ^ 0x5851_f42d_4c95_7f2d), |h, b| mix64(h ^ u64::from(b)))
}
