//! Counter-based, splittable randomness.
//!
//! Multistart sampling, AR(1) innovations, and Monte Carlo replication all
//! need draws that are pure functions of (seed, stream, counter): the same
//! configuration must replay bit-identically no matter how work is spread
//! over threads. Draw `i` of stream `s` is `mix(split(seed, s) + i * GAMMA)`
//! with the splitmix64 finalizer as `mix`, so any stream can be recreated
//! from its indices alone.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent child seed, e.g. one per Monte Carlo sample.
pub fn split(seed: u64, index: u64) -> u64 {
    mix(seed ^ mix(index.wrapping_mul(GOLDEN_GAMMA)))
}

/// One random stream: a mixed key plus a draw counter.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Stream `stream` of the generator keyed by `seed`.
    pub fn stream(seed: u64, stream: u64) -> Self {
        Self { key: split(seed, stream), counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw on (lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.uniform() * (hi - lo)
    }

    /// Standard normal draw by inverting the CDF of a uniform.
    pub fn standard_normal(&mut self) -> f64 {
        crate::stats::normal_quantile(self.uniform())
    }
}
