//! Small-space frequency estimators used as the verifier's summary.

mod count_median;
mod emg;
mod misra_gries;

pub use count_median::{CountMedian, CountMedianConfig};
pub use emg::Emg;
pub use misra_gries::MisraGries;

/// `⌈log₂(v + 1)⌉`, at least 1: bits to hold any value in `[0, v]`.
pub(crate) fn bits_for(v: u64) -> u64 {
    (64 - v.leading_zeros()).max(1) as u64
}
