//! Reproducible random spectra.
//!
//! The generator is xoshiro256** seeded through SplitMix64
//! (`Xoshiro256StarStar::seed_from_u64`). Uniform `f64` draws take the top
//! 53 bits of each output, so any xoshiro256** implementation with the same
//! seeding reproduces the sample sets.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: Xoshiro256StarStar,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// `n` sorted values uniform in `[lo, hi)` with all gaps at least
    /// `min_gap`, by rejection.
    pub fn distinct_spectrum(&mut self, n: usize, lo: f64, hi: f64, min_gap: f64) -> Vec<f64> {
        loop {
            let mut v: Vec<f64> = (0..n).map(|_| self.uniform(lo, hi)).collect();
            v.sort_by(f64::total_cmp);
            if v.windows(2).all(|w| w[1] - w[0] >= min_gap) {
                return v;
            }
        }
    }
}
