//! Seeded random streams.
//!
//! Backed by ChaCha8 (256-bit key, 64-bit block counter, 64-bit stream id),
//! so a seed fully determines the sample stream on every platform.
//! Independent sub-streams are derived with [`SeededRng::substream`] so that
//! adding a consumer (e.g. the explorer network) never shifts the samples
//! seen by the others.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::complex::{require_non_negative, CVector, C64};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh generator on stream `stream` of the same key.
    pub fn substream(&self, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(stream);
        Self { seed: self.seed, inner }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Uniform index in `0..n`; `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }
}

/// `n` i.i.d. circularly-symmetric complex Gaussians `CN(0, variance)`.
pub fn sample_cn(rng: &mut SeededRng, variance: f64, n: usize) -> Result<CVector> {
    require_non_negative("variance", variance)?;
    let sd = libm::sqrt(variance / 2.0);
    let data = (0..n)
        .map(|_| {
            let re = rng.standard_normal();
            let im = rng.standard_normal();
            C64::new(sd * re, sd * im)
        })
        .collect();
    Ok(CVector::from_vec(data))
}
