//! The annotated-stream protocol for `G(f) = Σ_j g(f_j)`.
//!
//! The verifier fingerprints the `d1 × d2` frequency grid at a secret row
//! point `r` and runs a small-space summary (EMG or Count-Median) that
//! bounds every frequency it does not report. The prover then claims exact
//! frequencies for a set `S` covering all possibly large keys and sends two
//! univariate polynomials: `P'`, whose row sum is the contribution of keys
//! outside `S`, and `Q'`, whose row sum is zero exactly when every claim is
//! correct. Both are spot-checked at `r`.

mod adversary;
mod cost;
mod help;
mod params;
mod prover;
mod verifier;

pub use adversary::{adversary_wrap, Attack, Attacked};
pub use cost::{CostMeter, CostReport};
pub use help::{hcost_bits, HelpMessage, HelpReader, MAGIC};
pub use params::{SchemeConfig, SchemeParams, Variant};
pub use prover::{build_help, Prover};
pub use verifier::{GTarget, RejectReason, SchemeOutcome, Verifier};

use crate::error::SchemeError;
use crate::exec::Exec;
use crate::ff::{interpolate, DensePoly, Field};
use crate::gfun::GSpec;
use crate::stream::StreamToken;

/// The lowest-degree polynomial agreeing with `g` on `[-band, band]`.
pub fn build_g_tilde(
    field: &Field,
    g: &GSpec,
    band: u64,
    n: usize,
) -> Result<DensePoly, SchemeError> {
    if 2 * band as u128 + 1 > field.modulus() as u128 {
        return Err(SchemeError::config("band too wide for the field"));
    }
    let bound = g.bound(n);
    let b = band as i64;
    let mut points = Vec::with_capacity(2 * band as usize + 1);
    for x in -b..=b {
        let v = g.eval(x);
        if v as u128 > bound {
            return Err(SchemeError::GContract {
                arg: x,
                value: v,
                bound,
            });
        }
        points.push((field.from_i64(x), field.elem(v)));
    }
    Ok(interpolate(field, &points)?)
}

/// Runs the verifier over `stream` and then `help`.
pub fn verify_stream(
    params: &SchemeParams,
    stream: &[StreamToken],
    target: &GTarget,
    help: &[u8],
    seed: u64,
) -> Result<SchemeOutcome, SchemeError> {
    let mut v = Verifier::new(params, seed)?;
    v.process_all(stream)?;
    Ok(v.finish(target, help))
}

/// Honest prover followed by the verifier.
pub fn run_honest(
    params: &SchemeParams,
    stream: &[StreamToken],
    g: &GSpec,
    seed: u64,
    exec: Exec,
) -> Result<SchemeOutcome, SchemeError> {
    let help = build_help(params, stream, g, &[], exec)?;
    verify_stream(
        params,
        stream,
        &GTarget::Fixed(g.clone()),
        &help.encode(&params.field),
        seed,
    )
}
