use std::collections::BTreeMap;

use super::bits_for;

/// Misra-Gries summary for insert-only streams.
///
/// Holds at most `capacity` keys; every stored counter is positive. Keys
/// are kept ordered so the decrement pass is deterministic and a prover can
/// replay the verifier's summary exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisraGries {
    capacity: usize,
    table: BTreeMap<u32, u64>,
    tokens_seen: u64,
}

impl MisraGries {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "capacity must be positive");
        Self {
            capacity,
            table: BTreeMap::new(),
            tokens_seen: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn tokens_seen(&self) -> u64 {
        self.tokens_seen
    }

    pub fn process(&mut self, j: u32) {
        self.tokens_seen += 1;
        if let Some(c) = self.table.get_mut(&j) {
            *c += 1;
        } else if self.table.len() < self.capacity {
            self.table.insert(j, 1);
        } else {
            self.table.retain(|_, c| {
                *c -= 1;
                *c > 0
            });
        }
    }

    /// `K[j]`, or 0 if `j` is not a key.
    pub fn estimate(&self, j: u32) -> u64 {
        self.table.get(&j).copied().unwrap_or(0)
    }

    pub fn contains(&self, j: u32) -> bool {
        self.table.contains_key(&j)
    }

    pub fn keys(&self) -> impl Iterator<Item = u32> + '_ {
        self.table.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Stored keys times `⌈log₂ n⌉ + ⌈log₂ m⌉`.
    pub fn size_bits(&self, n: usize) -> u64 {
        self.table.len() as u64 * (bits_for(n as u64) + bits_for(self.tokens_seen))
    }
}
