//! Deterministic pseudo-random streams.
//!
//! Every stochastic routine in the crate draws from a stream addressed by a
//! `(seed, stream)` pair. Streams with distinct indices are statistically
//! independent, so parallel workers can consume "their" streams without any
//! shared state, and results do not depend on how samples are distributed
//! over threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A seeded, stream-addressed generator.
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    /// Open the stream `stream` of the generator family identified by `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        StreamRng { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw from `1..=n` by rejection on the top of the 64-bit range.
    ///
    /// Hand-rolled so the byte-for-byte output of seeded runs is pinned by
    /// this crate alone.
    pub fn uniform_1_to_n(&mut self, n: u32) -> u32 {
        debug_assert!(n >= 1);
        let n64 = u64::from(n);
        let zone = u64::MAX - u64::MAX % n64;
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n64) as u32 + 1;
            }
        }
    }

    /// The insertion positions `w_1..w_n` of one shuffle plan, each uniform
    /// on `{1..n}`.
    pub fn draw_positions(&mut self, n: usize, out: &mut Vec<u32>) {
        out.clear();
        out.reserve(n);
        for _ in 0..n {
            out.push(self.uniform_1_to_n(n as u32));
        }
    }
}
