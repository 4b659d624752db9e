//! Seeded randomness.
//!
//! Every random draw in the crate comes from a ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64`. Component streams are derived from the
//! user-supplied seed by hashing `(seed, label)` with SHA-256 and taking the
//! first eight bytes little-endian, so the same seed reproduces bit-identical
//! runs on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
