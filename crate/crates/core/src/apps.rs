//! Ready-made applications reduced to the generic scheme: distinct
//! elements, the maximum frequency, and multiset inclusion.

use serde::{Deserialize, Serialize};

use crate::error::SchemeError;
use crate::exec::Exec;
use crate::ff::{Fe, Field};
use crate::gfun::GSpec;
use crate::scheme::{
    verify_stream, GTarget, HelpMessage, Prover, RejectReason, SchemeConfig, SchemeOutcome,
    SchemeParams,
};
use crate::stream::{multiset_to_stream, FrequencyVector, StreamToken, TaggedToken};

/// An application answer; `value` is present iff the scheme accepted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppResult<T> {
    pub value: Option<T>,
    pub outcome: SchemeOutcome,
}

impl<T> AppResult<T> {
    fn from_outcome(outcome: SchemeOutcome, f: impl FnOnce(i128) -> T) -> Self {
        Self {
            value: outcome.result.map(f),
            outcome,
        }
    }
}

/// `G = Σ g(f_j)` with an honest prover.
pub fn run_generic(
    cfg: &SchemeConfig,
    stream: &[StreamToken],
    g: &GSpec,
    seed: u64,
    exec: Exec,
) -> Result<AppResult<i128>, SchemeError> {
    let params = SchemeParams::new(cfg, g)?;
    let outcome = crate::scheme::run_honest(&params, stream, g, seed, exec)?;
    Ok(AppResult::from_outcome(outcome, |v| v))
}

/// Number of keys with nonzero frequency.
pub fn run_f0(
    cfg: &SchemeConfig,
    stream: &[StreamToken],
    seed: u64,
    exec: Exec,
) -> Result<AppResult<u64>, SchemeError> {
    let r = run_generic(cfg, stream, &GSpec::f0(), seed, exec)?;
    Ok(AppResult::from_outcome(r.outcome, |v| v as u64))
}

/// Whether multiset `X` is contained in `Y`, from interleaved tagged tokens.
pub fn run_multiset_inclusion(
    cfg: &SchemeConfig,
    tokens: &[TaggedToken],
    seed: u64,
    exec: Exec,
) -> Result<AppResult<bool>, SchemeError> {
    let stream = multiset_to_stream(tokens);
    let r = run_generic(cfg, &stream, &GSpec::negative(), seed, exec)?;
    Ok(AppResult::from_outcome(r.outcome, |v| v == 0))
}

/// The F∞ proof: the claimed arg-max and its frequency, then a help message
/// for `g(x) = 1{x > value}` whose claimed set includes `key`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinfProof {
    pub key: u32,
    pub value: Fe,
    pub help: HelpMessage,
}

impl FinfProof {
    pub const HEADER_BYTES: usize = 12;

    pub fn encode(&self, field: &Field) -> Vec<u8> {
        let mut out = self.key.to_le_bytes().to_vec();
        out.extend_from_slice(&field.encode(self.value));
        out.extend(self.help.encode(field));
        out
    }
}

/// A dishonest F∞ prover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinfLie {
    /// Names the largest key whose frequency is strictly below the maximum.
    WrongKey,
    /// Names the true arg-max with its frequency off by `delta`.
    WrongValue { delta: i64 },
}

/// Parameters for F∞; the pivot only affects `g`, not the field.
pub fn finf_params(cfg: &SchemeConfig) -> Result<SchemeParams, SchemeError> {
    SchemeParams::new(cfg, &GSpec::above(0))
}

/// A proof naming `key` with claimed maximum `value`. The claimed set is the
/// honest one plus `key`, carrying `value` for it.
fn finf_proof(
    params: &SchemeParams,
    stream: &[StreamToken],
    key: u32,
    value: i64,
    exec: Exec,
) -> Result<FinfProof, SchemeError> {
    let field = &params.field;
    let g = GSpec::above(value);
    let prover = Prover::new(params, stream, &g, &[key])?;
    let mut help = prover.help(exec)?;
    // an honest claim set with the claimed pivot value substituted
    if let Some(c) = help.claims.iter_mut().find(|c| c.0 == key) {
        c.1 = field.from_i64(value);
    }
    if prover.frequencies().get(key as usize) != value {
        help.q = prover.q_poly(&help.claims, exec)?;
    }
    Ok(FinfProof {
        key,
        value: field.from_i64(value),
        help,
    })
}

/// Verifies an encoded F∞ proof against `stream`.
pub fn verify_finf(
    params: &SchemeParams,
    stream: &[StreamToken],
    proof: &[u8],
    seed: u64,
) -> Result<AppResult<i64>, SchemeError> {
    let header = proof.get(..FinfProof::HEADER_BYTES);
    let (key, raw, rest) = match header {
        Some(h) => (
            u32::from_le_bytes(h[..4].try_into().expect("4 bytes")),
            u64::from_le_bytes(h[4..].try_into().expect("8 bytes")),
            &proof[FinfProof::HEADER_BYTES..],
        ),
        // forces a malformed verdict below while still metering the stream
        None => (0, 0, proof),
    };
    let mut outcome = verify_stream(
        params,
        stream,
        &GTarget::AbovePivot { key, raw },
        rest,
        seed,
    )?;
    outcome.hcost_bits = 8 * proof.len() as u64;
    let field = &params.field;
    let pivot = field.to_signed(field.elem(raw));
    let outcome = match outcome.result {
        Some(0) => outcome,
        Some(_) => outcome.reject(
            RejectReason::MaxClaimRefuted,
            "a frequency exceeds the claimed maximum",
        ),
        None => outcome,
    };
    Ok(AppResult::from_outcome(outcome, |_| pivot))
}

/// Maximum signed frequency, with an honest prover.
pub fn run_finf(
    cfg: &SchemeConfig,
    stream: &[StreamToken],
    seed: u64,
    exec: Exec,
) -> Result<AppResult<i64>, SchemeError> {
    let params = finf_params(cfg)?;
    let fv = FrequencyVector::from_stream(params.n, stream)?;
    let (j, f) = fv.argmax();
    let proof = finf_proof(&params, stream, j as u32, f, exec)?;
    verify_finf(&params, stream, &proof.encode(&params.field), seed)
}

/// F∞ with a lying prover. `None` when the lie is impossible (no key has a
/// frequency strictly below the maximum, or the shifted value exceeds the
/// stream-length cap).
pub fn run_finf_dishonest(
    cfg: &SchemeConfig,
    stream: &[StreamToken],
    lie: FinfLie,
    seed: u64,
    exec: Exec,
) -> Result<Option<AppResult<i64>>, SchemeError> {
    let params = finf_params(cfg)?;
    let fv = FrequencyVector::from_stream(params.n, stream)?;
    let (j_max, f_max) = fv.argmax();
    let (key, value) = match lie {
        FinfLie::WrongKey => {
            let runner_up = (1..=params.n)
                .filter(|&j| fv.get(j) < f_max)
                .max_by_key(|&j| (fv.get(j), std::cmp::Reverse(j)));
            match runner_up {
                Some(j) => (j as u32, fv.get(j)),
                None => return Ok(None),
            }
        }
        FinfLie::WrongValue { delta } => {
            if delta == 0 {
                return Ok(None);
            }
            (j_max as u32, f_max + delta)
        }
    };
    if value.unsigned_abs() > params.m_cap {
        return Ok(None);
    }
    let proof = finf_proof(&params, stream, key, value, exec)?;
    verify_finf(&params, stream, &proof.encode(&params.field), seed).map(Some)
}

/// Oracle for multiset inclusion: every multiplicity in `X` is at most the one in `Y`.
pub fn multiset_oracle(n: usize, tokens: &[TaggedToken]) -> Result<bool, SchemeError> {
    let fv = FrequencyVector::from_stream(n, &multiset_to_stream(tokens))?;
    Ok(fv.as_slice().iter().all(|&f| f >= 0))
}
