use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bits_for;
use crate::stream::StreamToken;

/// Sizing for a [`CountMedian`] sketch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountMedianConfig {
    /// Error as a fraction of `‖f‖₁`.
    pub phi: f64,
    /// Target failure probability.
    pub epsilon: f64,
    /// Depth multiplier `c_d`.
    pub depth_const: f64,
}

impl CountMedianConfig {
    pub fn new(phi: f64, epsilon: f64) -> Self {
        Self {
            phi,
            epsilon,
            depth_const: 4.0,
        }
    }

    /// `⌈2/φ⌉` rounded up to a power of two (multiply-shift hashing).
    pub fn width(&self) -> usize {
        ((2.0 / self.phi).ceil() as usize)
            .max(1)
            .next_power_of_two()
    }

    /// `⌈c_d · ln(1/ε)⌉`, bumped to the next odd number so the median is a
    /// single row.
    pub fn depth(&self) -> usize {
        let d = (self.depth_const * (1.0 / self.epsilon).ln())
            .ceil()
            .max(1.0) as usize;
        d | 1
    }
}

/// Count-Median sketch: `depth` rows of `width` signed counters, one
/// pairwise-independent multiply-shift hash per row; the estimate is the
/// median of the selected counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountMedian {
    width: usize,
    log_width: u32,
    depth: usize,
    counters: Vec<i64>,
    seeds: Vec<(u64, u64)>,
    tokens_seen: u64,
}

impl CountMedian {
    pub fn new<R: Rng + ?Sized>(cfg: &CountMedianConfig, rng: &mut R) -> Self {
        let seeds = (0..cfg.depth())
            .map(|_| (rng.random(), rng.random()))
            .collect();
        Self::with_seeds(cfg.width(), seeds)
    }

    /// Explicit hash parameters; `width` must be a power of two.
    pub fn with_seeds(width: usize, seeds: Vec<(u64, u64)>) -> Self {
        assert!(width.is_power_of_two(), "width must be a power of two");
        assert!(!seeds.is_empty(), "need at least one row");
        Self {
            width,
            log_width: width.trailing_zeros(),
            depth: seeds.len(),
            counters: vec![0; width * seeds.len()],
            seeds,
            tokens_seen: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn seeds(&self) -> &[(u64, u64)] {
        &self.seeds
    }

    #[inline]
    fn bucket(&self, row: usize, j: u32) -> usize {
        if self.log_width == 0 {
            return 0;
        }
        let (a, b) = self.seeds[row];
        (a.wrapping_mul(j as u64).wrapping_add(b) >> (64 - self.log_width)) as usize
    }

    pub fn process(&mut self, t: &StreamToken) {
        self.tokens_seen += 1;
        for row in 0..self.depth {
            let col = self.bucket(row, t.index);
            self.counters[row * self.width + col] += t.delta as i64;
        }
    }

    pub fn estimate(&self, j: u32) -> i64 {
        let mut vals: Vec<i64> = (0..self.depth)
            .map(|row| self.counters[row * self.width + self.bucket(row, j)])
            .collect();
        let mid = vals.len() / 2;
        *vals.select_nth_unstable(mid).1
    }

    pub fn tokens_seen(&self) -> u64 {
        self.tokens_seen
    }

    /// Counters at `⌈log₂ m⌉ + 1` bits each, plus two 64-bit seeds per row.
    pub fn size_bits(&self) -> u64 {
        let counter = bits_for(self.tokens_seen) + 1;
        (self.depth * self.width) as u64 * counter + 128 * self.depth as u64
    }
}
