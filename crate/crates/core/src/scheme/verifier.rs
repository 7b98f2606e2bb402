use rand::Rng;
use serde::{Deserialize, Serialize};

use super::build_g_tilde;
use super::cost::{CostMeter, CostReport};
use super::help::{hcost_bits, HelpReader};
use super::params::{SchemeParams, Variant};
use crate::error::SchemeError;
use crate::ff::{eval_poly, Fe, Field, StreamingEval};
use crate::gfun::GSpec;
use crate::lde::{ClaimRows, LdeRow};
use crate::stream::{seeded_rng, substream, StreamToken};
use crate::summaries::{bits_for, CountMedian, Emg};

/// Why a help message was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    PMismatch,
    QMismatch,
    TNonzero,
    MNotSubset,
    Malformed,
    /// F∞ only: some frequency exceeds the claimed maximum.
    MaxClaimRefuted,
}

/// What `g` the verifier applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GTarget {
    Fixed(GSpec),
    /// `g(x) = 1{x > f'_key}` where `(key, raw)` is a prover-supplied claim
    /// that must reappear verbatim among the claims.
    AbovePivot {
        key: u32,
        raw: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeOutcome {
    pub variant: Variant,
    /// `None` is ⊥.
    pub result: Option<i128>,
    pub reject_reason: Option<RejectReason>,
    pub detail: Option<String>,
    pub hcost_bits: u64,
    pub vcost_bits: u64,
}

impl SchemeOutcome {
    pub fn accepted(&self) -> bool {
        self.result.is_some()
    }

    pub fn cost(&self) -> CostReport {
        CostReport {
            hcost_bits: self.hcost_bits,
            vcost_bits: self.vcost_bits,
        }
    }

    /// Turns an accepted outcome into a rejection (used by application
    /// layers that post-check the result).
    pub fn reject(mut self, reason: RejectReason, detail: &str) -> Self {
        self.result = None;
        self.reject_reason = Some(reason);
        self.detail = Some(detail.to_owned());
        self
    }
}

#[derive(Clone, Debug)]
enum Summary {
    Emg(Emg),
    Cm(CountMedian),
}

type Reject = (RejectReason, &'static str);

fn malformed(detail: &'static str) -> Reject {
    (RejectReason::Malformed, detail)
}

/// Streaming verifier. Holds the secret point, the fingerprint row and the
/// summary; consumes the help message in one pass at the end.
#[derive(Clone, Debug)]
pub struct Verifier<'p> {
    params: &'p SchemeParams,
    lde: LdeRow,
    summary: Summary,
    m: u64,
    meter: CostMeter,
}

impl<'p> Verifier<'p> {
    /// Draws `r` (and the sketch hashes) from the verifier substream of `seed`.
    pub fn new(params: &'p SchemeParams, seed: u64) -> Result<Self, SchemeError> {
        let mut rng = seeded_rng(seed, substream::VERIFIER);
        let r = params
            .field
            .elem(rng.random_range(0..params.field.modulus()));
        Self::build(params, r, &mut rng)
    }

    /// Fixed evaluation point; for exhaustive soundness sweeps.
    pub fn with_point(params: &'p SchemeParams, r: Fe, seed: u64) -> Result<Self, SchemeError> {
        let mut rng = seeded_rng(seed, substream::VERIFIER);
        let _: u64 = rng.random();
        Self::build(params, r, &mut rng)
    }

    fn build<R: Rng>(params: &'p SchemeParams, r: Fe, rng: &mut R) -> Result<Self, SchemeError> {
        let lde = LdeRow::new(&params.field, params.shape, r)?;
        let summary = match (params.variant, &params.cm) {
            (Variant::Emg, _) => Summary::Emg(Emg::new(params.capacity)),
            (Variant::CountMedian, Some(cfg)) => Summary::Cm(CountMedian::new(cfg, rng)),
            (Variant::CountMedian, None) => {
                return Err(SchemeError::config(
                    "count-median variant without sketch config",
                ))
            }
        };
        let mut v = Self {
            params,
            lde,
            summary,
            m: 0,
            meter: CostMeter::default(),
        };
        v.meter.observe(v.stream_state_bits());
        Ok(v)
    }

    pub fn process(&mut self, t: &StreamToken) -> Result<(), SchemeError> {
        t.check(self.params.n)?;
        if self.m >= self.params.m_cap {
            return Err(SchemeError::StreamTooLong {
                cap: self.params.m_cap,
            });
        }
        self.m += 1;
        self.lde.update(&self.params.field, t);
        match &mut self.summary {
            Summary::Emg(e) => e.process(t),
            Summary::Cm(c) => c.process(t),
        }
        self.meter.observe(self.stream_state_bits());
        Ok(())
    }

    pub fn process_all(&mut self, stream: &[StreamToken]) -> Result<(), SchemeError> {
        stream.iter().try_for_each(|t| self.process(t))
    }

    /// Peak state size so far.
    pub fn vcost_bits(&self) -> u64 {
        self.meter.peak()
    }

    fn elem_bits(&self) -> u64 {
        self.params.field.bits_per_elem() as u64
    }

    /// Fingerprint row, summary, token counter.
    fn stream_state_bits(&self) -> u64 {
        let summary = match &self.summary {
            Summary::Emg(e) => e.size_bits(self.params.n),
            Summary::Cm(c) => c.size_bits(),
        };
        self.lde.size_bits(&self.params.field) + summary + bits_for(self.m)
    }

    /// Claim rows, `g̃`, one streaming evaluator over `d1 + 1` points, and
    /// scalar accumulators (L, R, T, P(r), Q(r), last key, claim count).
    fn verification_bits(&self) -> u64 {
        let b = self.elem_bits();
        let d1 = self.params.shape.d1 as u64;
        let d2 = self.params.shape.d2 as u64;
        let rows = 2 * d2 * b;
        let g_tilde = (2 * self.params.band + 1) * b;
        let eval = 3 * (d1 + 1) * b;
        let scalars = 128 + 4 * b + 2 * 32;
        self.stream_state_bits() + rows + g_tilde + eval + scalars
    }

    /// Reads the help message and decides.
    pub fn finish(mut self, target: &GTarget, help: &[u8]) -> SchemeOutcome {
        self.meter.observe(self.verification_bits());
        let verdict = self.verify(target, help);
        let (result, reject_reason, detail) = match verdict {
            Ok(v) => (Some(v), None, None),
            Err((reason, detail)) => (None, Some(reason), Some(detail.to_owned())),
        };
        SchemeOutcome {
            variant: self.params.variant,
            result,
            reject_reason,
            detail,
            hcost_bits: hcost_bits(help),
            vcost_bits: self.meter.peak(),
        }
    }

    fn cm_heavy(&self, j: u32) -> bool {
        match &self.summary {
            Summary::Cm(c) => 4 * c.estimate(j).unsigned_abs() >= 3 * self.params.band,
            Summary::Emg(_) => false,
        }
    }

    fn verify(&self, target: &GTarget, bytes: &[u8]) -> Result<i128, Reject> {
        let params = self.params;
        let field = &params.field;
        let n = params.n;
        let m = self.m as i128;
        let lift = |v: Fe| field.to_signed(v) as i128;

        let (g, pivot) = match target {
            GTarget::Fixed(g) => (g.clone(), None),
            GTarget::AbovePivot { key, raw } => {
                let v = field
                    .from_canonical(*raw)
                    .ok_or(malformed("pivot value not canonical"))?;
                if *key == 0 || *key as usize > n || lift(v).abs() > m {
                    return Err(malformed("pivot out of range"));
                }
                (GSpec::above(lift(v) as i64), Some((*key, v)))
            }
        };

        let mut rd = HelpReader::new(bytes);
        rd.magic().ok_or(malformed("bad magic"))?;
        let count = rd.u32().ok_or(malformed("truncated"))? as usize;
        if count > params.claim_cap {
            return Err(malformed("too many claims"));
        }

        let weights = self.lde.weights();
        let mut rows = ClaimRows::new(field, params.shape);
        let mut light_claims: i128 = 0;
        let mut prev = 0u32;
        let mut covered = 0usize;
        let mut m_subset = true;
        let mut pivot_seen = false;
        for _ in 0..count {
            let j = rd.u32().ok_or(malformed("truncated"))?;
            let v = rd.fe(field).ok_or(malformed("claim value not canonical"))?;
            if j <= prev || j as usize > n {
                return Err(malformed("claims not strictly ascending in [1, n]"));
            }
            let f = lift(v);
            if f.abs() > m {
                return Err(malformed("claimed frequency exceeds stream length"));
            }
            match &self.summary {
                Summary::Emg(e) => covered += e.is_key(j) as usize,
                Summary::Cm(_) => m_subset &= !(prev + 1..j).any(|k| self.cm_heavy(k)),
            }
            if let Some((key, pv)) = pivot {
                if key == j {
                    if pv != v {
                        return Err(malformed("pivot disagrees with its claim"));
                    }
                    pivot_seen = true;
                }
            }
            rows.push(field, weights, j as usize, v);
            light_claims += g.eval(f as i64) as i128;
            prev = j;
        }
        if let Summary::Cm(_) = self.summary {
            m_subset &= !(prev as usize + 1..=n).any(|k| self.cm_heavy(k as u32));
        }

        let g_tilde = build_g_tilde(field, &g, params.band, n)
            .map_err(|_| malformed("g outside its contract"))?;
        let points: Vec<Fe> = std::iter::once(self.lde.point())
            .chain((1..=params.shape.d1 as u64).map(|x| field.elem(x)))
            .collect();
        let p_vals = read_poly(&mut rd, field, params.deg_p + 1, points.clone())?;
        let q_vals = read_poly(&mut rd, field, params.deg_q + 1, points)?;
        if !rd.at_end() {
            return Err(malformed("trailing bytes"));
        }

        match &self.summary {
            Summary::Emg(e) if covered != e.key_count() => {
                return Err(malformed("claims omit summary keys"));
            }
            Summary::Cm(_) if !m_subset => {
                return Err((RejectReason::MNotSubset, "sketch-heavy key left unclaimed"));
            }
            _ => {}
        }
        if pivot.is_some() && !pivot_seen {
            return Err(malformed("pivot key not among claims"));
        }

        let f_row = self.lde.row();
        let p_r = f_row
            .iter()
            .zip(rows.in_set_row())
            .fold(field.zero(), |acc, (&f, &s)| {
                let h = field.sub(field.one(), s);
                field.add(acc, field.mul(eval_poly(field, &g_tilde, f), h))
            });
        if p_r != p_vals[0] {
            return Err((RejectReason::PMismatch, "P'(r) differs from P(r)"));
        }
        let q_r = f_row
            .iter()
            .zip(rows.claims_row())
            .zip(rows.in_set_row())
            .fold(field.zero(), |acc, ((&f, &c), &s)| {
                field.add(acc, field.mul(field.square(field.sub(f, c)), s))
            });
        if q_r != q_vals[0] {
            return Err((RejectReason::QMismatch, "Q'(r) differs from Q(r)"));
        }
        let t = q_vals[1..]
            .iter()
            .fold(field.zero(), |acc, &x| field.add(acc, x));
        if t != field.zero() {
            return Err((RejectReason::TNonzero, "claimed frequencies are not exact"));
        }
        let heavy_sum = p_vals[1..]
            .iter()
            .fold(field.zero(), |acc, &x| field.add(acc, x));
        let pad = params.padding() as i128 * g.eval(0) as i128;
        Ok(light_claims + field.value(heavy_sum) as i128 - pad)
    }
}

/// Streams exactly `len` coefficients through an evaluator at `points`.
fn read_poly(
    rd: &mut HelpReader<'_>,
    field: &Field,
    len: usize,
    points: Vec<Fe>,
) -> Result<Vec<Fe>, Reject> {
    let declared = rd.u32().ok_or(malformed("truncated"))? as usize;
    if declared != len {
        return Err(malformed("wrong coefficient count"));
    }
    let mut ev = StreamingEval::new(field, points);
    for _ in 0..len {
        ev.push(
            field,
            rd.fe(field).ok_or(malformed("coefficient not canonical"))?,
        );
    }
    Ok(ev.values().to_vec())
}
