//! Counter-based random streams.
//!
//! A stream is identified by `(root_seed, stream_index)`. The underlying
//! ChaCha20 generator keys on the seed and uses the index as its stream
//! (nonce) word, so every stream is a pure function of the pair and streams
//! with distinct indices never overlap.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    root_seed: u64,
    stream_index: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(root_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(root_seed);
        inner.set_stream(stream_index);
        Self {
            root_seed,
            stream_index,
            inner,
        }
    }

    /// Stream for replication `replication` of experiment `experiment`.
    pub fn for_replication(root_seed: u64, experiment: u32, replication: u32) -> Self {
        Self::new(root_seed, ((experiment as u64) << 32) | replication as u64)
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        loop {
            // 53 random mantissa bits, then shift off zero.
            let u = (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        rand::Rng::sample(self, rand_distr::StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Stable 32-bit experiment id derived from a name (FNV-1a).
pub fn experiment_id(name: &str) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for b in name.bytes() {
        h ^= b as u32;
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}
