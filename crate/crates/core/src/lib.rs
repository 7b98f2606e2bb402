//! Annotated data-streaming schemes for frequency-based functions
//! `G(f) = Σ_j g(f_j)` over turnstile streams.
//!
//! A verifier with `O(n^{2/3} log n)` bits of memory reads the stream, then
//! checks a help message of the same order sent by an untrusted prover and
//! either outputs `G` exactly or rejects.
//!
//! ```
//! use avs_core::apps::run_f0;
//! use avs_core::exec::Exec;
//! use avs_core::scheme::SchemeConfig;
//! use avs_core::stream::StreamToken;
//!
//! let stream = [StreamToken::insert(3), StreamToken::insert(5), StreamToken::delete(3)];
//! let r = run_f0(&SchemeConfig::emg(64, 4), &stream, 7, Exec::default()).unwrap();
//! assert_eq!(r.value, Some(1));
//! ```

pub mod apps;
pub mod error;
pub mod exec;
pub mod ff;
pub mod gfun;
pub mod lde;
pub mod scheme;
pub mod stream;
pub mod summaries;

pub use error::{FieldError, SchemeError, StreamError};
