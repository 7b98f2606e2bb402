use std::collections::BTreeSet;

use super::MisraGries;
use crate::stream::StreamToken;

/// Misra-Gries extended to turnstile streams: one copy counts insertions,
/// a second counts deletions as increments. Estimates are two-sided within
/// `m / capacity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Emg {
    pos: MisraGries,
    neg: MisraGries,
}

impl Emg {
    pub fn new(capacity: usize) -> Self {
        Self {
            pos: MisraGries::new(capacity),
            neg: MisraGries::new(capacity),
        }
    }

    pub fn process(&mut self, t: &StreamToken) {
        if t.delta > 0 {
            self.pos.process(t.index);
        } else {
            self.neg.process(t.index);
        }
    }

    pub fn estimate(&self, j: u32) -> i64 {
        self.pos.estimate(j) as i64 - self.neg.estimate(j) as i64
    }

    pub fn tokens_seen(&self) -> u64 {
        self.pos.tokens_seen() + self.neg.tokens_seen()
    }

    pub fn capacity(&self) -> usize {
        self.pos.capacity()
    }

    /// Union of both copies' keys; `|f_j| ≤ m / capacity` off this set.
    pub fn keys(&self) -> BTreeSet<u32> {
        self.pos.keys().chain(self.neg.keys()).collect()
    }

    pub fn is_key(&self, j: u32) -> bool {
        self.pos.contains(j) || self.neg.contains(j)
    }

    pub fn key_count(&self) -> usize {
        self.pos.keys().filter(|j| !self.neg.contains(*j)).count() + self.neg.len()
    }

    pub fn size_bits(&self, n: usize) -> u64 {
        self.pos.size_bits(n) + self.neg.size_bits(n)
    }
}
