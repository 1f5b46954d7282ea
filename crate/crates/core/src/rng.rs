//! Counter-addressable random streams.
//!
//! Each draw is a pure function of `(seed, stream, index)`: the `index`-th
//! 64-bit word of the ChaCha8 stream `stream` keyed by `seed`, mapped to the
//! open unit interval and, for normals, through the inverse normal CDF. One
//! uniform per draw means a replication can be regenerated (or computed on
//! another worker) without replaying the ones before it.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::special::normal_quantile;

const TWO_POW_53: f64 = 9_007_199_254_740_992.0;

#[derive(Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Positions the stream so the next draw is the `index`-th.
    pub fn seek(&mut self, index: u64) {
        self.rng.set_word_pos(u128::from(index) * 2);
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) / TWO_POW_53
    }

    pub fn next_normal(&mut self) -> f64 {
        normal_quantile(self.next_uniform())
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.next_normal();
        }
    }
}
