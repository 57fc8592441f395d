//! Reproducible random streams and constant-time row sampling.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed and positioned
//! on one of its 2^64 independent 64-bit stream ids, so `(seed, stream)` fully
//! determines the output on every platform and at every thread count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Scalar};

/// A seeded random stream. Single-owner: give each concurrent trial its own.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` (Lemire's multiply-and-reject, unbiased).
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.rng.next_u64();
            let wide = (x as u128) * (n as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as usize;
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Walker/Vose alias table over row indices, drawing row `i` with
/// probability `||a_i||^2 / ||A||_F^2`.
#[derive(Clone, Debug)]
pub struct RowSampler {
    weights: Vec<f64>,
    // acceptance threshold per cell, scaled to [0, 1]
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl RowSampler {
    /// Sampler over the rows of `a`. Zero rows are allowed and are never drawn.
    pub fn from_matrix<T: Scalar>(a: &DenseMatrix<T>) -> Result<Self> {
        Self::from_weights(&a.row_norms_sq())
    }

    /// Sampler over arbitrary nonnegative weights (normalized internally).
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Domain(
                "sampler weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || total <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        let m = weights.len();
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();

        let mut prob: Vec<f64> = p.iter().map(|pi| pi * m as f64).collect();
        let mut alias: Vec<usize> = (0..m).collect();
        let mut small = Vec::new();
        let mut large = Vec::new();
        for (i, &s) in prob.iter().enumerate() {
            if s < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s] = l;
            prob[l] -= 1.0 - prob[s];
            if prob[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are full cells up to rounding.
        let heaviest = (0..m).max_by(|&i, &j| p[i].total_cmp(&p[j])).unwrap_or(0);
        for i in large.into_iter().chain(small) {
            if p[i] == 0.0 {
                prob[i] = 0.0;
                alias[i] = heaviest;
            } else {
                prob[i] = 1.0;
            }
        }
        Ok(RowSampler {
            weights: p,
            prob,
            alias,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Normalized weights `p_i`.
    pub fn probabilities(&self) -> &[f64] {
        &self.weights
    }

    /// Probabilities implied by the alias table itself.
    pub fn table_probabilities(&self) -> Vec<f64> {
        let m = self.len();
        let mut out = self.prob.clone();
        for (cell, &a) in self.alias.iter().enumerate() {
            out[a] += 1.0 - self.prob[cell];
        }
        out.iter_mut().for_each(|x| *x /= m as f64);
        out
    }

    #[inline]
    pub fn draw(&self, rng: &mut RngStream) -> usize {
        let cell = rng.below(self.len());
        if rng.uniform() < self.prob[cell] {
            cell
        } else {
            self.alias[cell]
        }
    }
}
