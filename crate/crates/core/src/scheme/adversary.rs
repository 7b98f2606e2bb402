//! Deterministic help-message mutations for soundness experiments.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::help::HelpMessage;
use super::prover::Prover;
use crate::error::SchemeError;
use crate::exec::Exec;
use crate::ff::{Fe, Field};
use crate::stream::{seeded_rng, substream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attack {
    /// Add a nonzero offset to one coefficient of `P'` or `Q'`.
    FlipCoefficient,
    /// Shift one claimed frequency by 1 to 3 toward zero.
    PerturbClaim,
    DropClaim,
    /// Exchange the values of two claims that differ.
    SwapClaims,
    /// Add a nonzero offset to the constant term of `P'`.
    InflateResult,
    /// Perturb a claim, then recompute `Q'` so it matches the forged claims.
    ForgeConsistent,
}

impl Attack {
    pub const ALL: [Attack; 6] = [
        Attack::FlipCoefficient,
        Attack::PerturbClaim,
        Attack::DropClaim,
        Attack::SwapClaims,
        Attack::InflateResult,
        Attack::ForgeConsistent,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Attack::FlipCoefficient => "flip-coefficient",
            Attack::PerturbClaim => "perturb-claim",
            Attack::DropClaim => "drop-claim",
            Attack::SwapClaims => "swap-claims",
            Attack::InflateResult => "inflate-result",
            Attack::ForgeConsistent => "forge-consistent",
        }
    }
}

impl fmt::Display for Attack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attack {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Attack::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| SchemeError::config(format!("unknown attack `{s}`")))
    }
}

/// A mutated help message. `no_op` marks attacks that had nothing to act on
/// (for example dropping a claim from an empty list); the help is then
/// returned unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attacked {
    pub help: HelpMessage,
    pub no_op: bool,
}

fn nonzero(field: &Field, rng: &mut impl Rng) -> Fe {
    field.elem(rng.random_range(1..field.modulus()))
}

/// `v` moved by 1 to 3 toward zero (away from zero when `v = 0`).
fn perturbed(field: &Field, v: Fe, rng: &mut impl Rng) -> Fe {
    let step = rng.random_range(1..=3i64);
    let lifted = field.to_signed(v);
    field.from_i64(if lifted > 0 {
        lifted - step
    } else {
        lifted + step
    })
}

/// Applies `attack` to an honest `help` produced by `prover`.
pub fn adversary_wrap(
    prover: &Prover<'_>,
    field: &Field,
    help: &HelpMessage,
    attack: Attack,
    seed: u64,
    exec: Exec,
) -> Result<Attacked, SchemeError> {
    let mut rng = seeded_rng(seed, substream::ADVERSARY);
    let mut out = help.clone();
    let unchanged = |h: &HelpMessage| Attacked {
        help: h.clone(),
        no_op: true,
    };
    match attack {
        Attack::FlipCoefficient => {
            let poly =
                if out.q.coeffs.is_empty() || (!out.p.coeffs.is_empty() && rng.random_bool(0.5)) {
                    &mut out.p
                } else {
                    &mut out.q
                };
            if poly.coeffs.is_empty() {
                return Ok(unchanged(help));
            }
            let i = rng.random_range(0..poly.coeffs.len());
            poly.coeffs[i] = field.add(poly.coeffs[i], nonzero(field, &mut rng));
        }
        Attack::InflateResult => {
            if out.p.coeffs.is_empty() {
                return Ok(unchanged(help));
            }
            out.p.coeffs[0] = field.add(out.p.coeffs[0], nonzero(field, &mut rng));
        }
        Attack::PerturbClaim | Attack::ForgeConsistent => {
            if out.claims.is_empty() {
                return Ok(unchanged(help));
            }
            let i = rng.random_range(0..out.claims.len());
            out.claims[i].1 = perturbed(field, out.claims[i].1, &mut rng);
            if attack == Attack::ForgeConsistent {
                out.q = prover.q_poly(&out.claims, exec)?;
            }
        }
        Attack::DropClaim => {
            if out.claims.is_empty() {
                return Ok(unchanged(help));
            }
            let i = rng.random_range(0..out.claims.len());
            out.claims.remove(i);
        }
        Attack::SwapClaims => {
            let n = out.claims.len();
            if n < 2 {
                return Ok(unchanged(help));
            }
            let i = rng.random_range(0..n);
            let partners: Vec<usize> = (0..n)
                .filter(|&k| out.claims[k].1 != out.claims[i].1)
                .collect();
            let Some(&k) = partners.get(rng.random_range(0..partners.len().max(1))) else {
                return Ok(unchanged(help));
            };
            let (a, b) = (out.claims[i].1, out.claims[k].1);
            out.claims[i].1 = b;
            out.claims[k].1 = a;
        }
    }
    Ok(Attacked {
        help: out,
        no_op: false,
    })
}
