//! Keyed random streams.
//!
//! Every annealing sweep draws from its own ChaCha8 stream keyed by
//! `(seed, chain)` with the sweep number as stream id; the `m`-th move of the
//! sweep consumes the next words of that stream. Results therefore depend
//! only on `(seed, chain, sweep, move)`, never on thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Stream for one sweep of one chain.
pub fn sweep_stream(seed: u64, chain: u64, sweep: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&chain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(sweep);
    rng
}

/// Per-component seed: the first eight bytes (little endian) of
/// `SHA-256(seed as 8 LE bytes ‖ component name)`.
pub fn derive_seed(seed: u64, component: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(component.as_bytes());
    let digest = h.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(out)
}
