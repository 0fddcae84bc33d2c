//! Deterministic per-stage random streams.
//!
//! All randomness flows from one seed; each pipeline stage draws from its own
//! ChaCha stream so stages can be re-run independently without perturbing the
//! others.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a. Stable across platforms and compiler versions, unlike the std
/// hasher, which matters for the determinism contract.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// RNG for a named pipeline stage.
pub fn stage_rng(seed: u64, stage: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a64(stage.as_bytes()));
    rng
}
