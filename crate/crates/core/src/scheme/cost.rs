use serde::{Deserialize, Serialize};

/// Help length and peak verifier space, in bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub hcost_bits: u64,
    pub vcost_bits: u64,
}

/// Tracks the peak of a sampled space measure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostMeter {
    peak: u64,
    samples: u64,
}

impl CostMeter {
    pub fn observe(&mut self, bits: u64) {
        self.peak = self.peak.max(bits);
        self.samples += 1;
    }

    pub fn peak(&self) -> u64 {
        self.peak
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }
}
