use std::collections::BTreeSet;

use super::build_g_tilde;
use super::help::HelpMessage;
use super::params::{SchemeParams, Variant};
use crate::error::SchemeError;
use crate::exec::{map_range, Exec};
use crate::ff::{eval_poly, interpolate, lagrange_row_weights, DensePoly, Fe, Field};
use crate::gfun::GSpec;
use crate::lde::{ClaimRows, FrequencyGrid};
use crate::stream::{FrequencyVector, StreamToken};
use crate::summaries::Emg;

/// Honest prover state: the full frequency vector plus the claimed set.
#[derive(Clone, Debug)]
pub struct Prover<'a> {
    params: &'a SchemeParams,
    fv: FrequencyVector,
    grid: FrequencyGrid,
    keys: Vec<u32>,
    g_tilde: DensePoly,
}

impl<'a> Prover<'a> {
    /// Reads the whole stream and fixes the claimed set `S`:
    /// the replayed EMG keys (EMG variant) or `{j : 2|f_j| ≥ B}` (Count-Median),
    /// plus `extra_keys`.
    pub fn new(
        params: &'a SchemeParams,
        stream: &[StreamToken],
        g: &GSpec,
        extra_keys: &[u32],
    ) -> Result<Self, SchemeError> {
        if stream.len() as u64 > params.m_cap {
            return Err(SchemeError::StreamTooLong { cap: params.m_cap });
        }
        let fv = FrequencyVector::from_stream(params.n, stream)?;
        let mut keys: BTreeSet<u32> = match params.variant {
            Variant::Emg => {
                let mut emg = Emg::new(params.capacity);
                stream.iter().for_each(|t| emg.process(t));
                emg.keys()
            }
            Variant::CountMedian => fv
                .nonzero()
                .filter(|&(_, f)| 2 * f.unsigned_abs() >= params.band)
                .map(|(j, _)| j as u32)
                .collect(),
        };
        for &j in extra_keys {
            if j == 0 || j as usize > params.n {
                return Err(SchemeError::config(format!(
                    "extra key {j} outside [1, {}]",
                    params.n
                )));
            }
            keys.insert(j);
        }
        if keys.len() > params.claim_cap {
            return Err(SchemeError::ProofTooLarge {
                claims: keys.len(),
                cap: params.claim_cap,
            });
        }
        let g_tilde = build_g_tilde(&params.field, g, params.band, params.n)?;
        Ok(Self {
            params,
            grid: FrequencyGrid::new(&fv, params.shape),
            fv,
            keys: keys.into_iter().collect(),
            g_tilde,
        })
    }

    pub fn frequencies(&self) -> &FrequencyVector {
        &self.fv
    }

    /// The claimed set, ascending.
    pub fn keys(&self) -> &[u32] {
        &self.keys
    }

    /// `(j, f_j)` for every `j ∈ S`.
    pub fn honest_claims(&self) -> Vec<(u32, Fe)> {
        let field = &self.params.field;
        self.keys
            .iter()
            .map(|&j| (j, field.from_i64(self.fv.get(j as usize))))
            .collect()
    }

    fn field(&self) -> &Field {
        &self.params.field
    }

    /// `P(t) = Σ_y g̃(f̃(t, y)) · h̃(t, y)`.
    pub fn p_at(&self, t: Fe) -> Result<Fe, SchemeError> {
        let field = self.field();
        let w = lagrange_row_weights(field, t, self.params.shape.d1)?;
        let f_row = self.grid.row_at(field, &w);
        let mut rows = ClaimRows::new(field, self.params.shape);
        for &j in &self.keys {
            rows.push(field, &w, j as usize, field.zero());
        }
        let acc = f_row
            .iter()
            .zip(rows.in_set_row())
            .fold(field.zero(), |acc, (&f, &s)| {
                let h = field.sub(field.one(), s);
                field.add(acc, field.mul(eval_poly(field, &self.g_tilde, f), h))
            });
        Ok(acc)
    }

    /// `Q(t) = Σ_y (f̃(t, y) − f̃'(t, y))² · (1 − h̃(t, y))` for the given claims.
    pub fn q_at(&self, claims: &[(u32, Fe)], t: Fe) -> Result<Fe, SchemeError> {
        let field = self.field();
        let w = lagrange_row_weights(field, t, self.params.shape.d1)?;
        let f_row = self.grid.row_at(field, &w);
        let mut rows = ClaimRows::new(field, self.params.shape);
        for &(j, v) in claims {
            rows.push(field, &w, j as usize, v);
        }
        let acc = f_row
            .iter()
            .zip(rows.claims_row())
            .zip(rows.in_set_row())
            .fold(field.zero(), |acc, ((&f, &c), &s)| {
                field.add(acc, field.mul(field.square(field.sub(f, c)), s))
            });
        Ok(acc)
    }

    /// `P` in coefficient form, from its values at `1..=D_P+1`.
    pub fn p_poly(&self, exec: Exec) -> Result<DensePoly, SchemeError> {
        self.poly_from_points(self.params.deg_p, exec, |t| self.p_at(t))
    }

    pub fn q_poly(&self, claims: &[(u32, Fe)], exec: Exec) -> Result<DensePoly, SchemeError> {
        self.poly_from_points(self.params.deg_q, exec, |t| self.q_at(claims, t))
    }

    fn poly_from_points<F>(
        &self,
        degree: usize,
        exec: Exec,
        eval: F,
    ) -> Result<DensePoly, SchemeError>
    where
        F: Fn(Fe) -> Result<Fe, SchemeError> + Sync + Send,
    {
        let field = self.field();
        let points = map_range(exec, degree + 1, |i| {
            let t = field.elem(i as u64 + 1);
            eval(t).map(|v| (t, v))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        Ok(interpolate(field, &points)?.padded(degree))
    }

    pub fn help(&self, exec: Exec) -> Result<HelpMessage, SchemeError> {
        let claims = self.honest_claims();
        Ok(HelpMessage {
            p: self.p_poly(exec)?,
            q: self.q_poly(&claims, exec)?,
            claims,
        })
    }
}

/// Honest help for `stream`; see [`Prover::new`] for the claimed set.
pub fn build_help(
    params: &SchemeParams,
    stream: &[StreamToken],
    g: &GSpec,
    extra_keys: &[u32],
    exec: Exec,
) -> Result<HelpMessage, SchemeError> {
    Prover::new(params, stream, g, extra_keys)?.help(exec)
}
