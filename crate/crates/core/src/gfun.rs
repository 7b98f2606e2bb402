//! The per-coordinate function `g` of a frequency-based function
//! `G(f) = Σ_j g(f_j)`, with its declared range exponent `p`
//! (`g(v) ≤ n^p` on every reachable argument).

use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{SchemeError, StreamError};

/// How a table-driven `g` behaves on arguments it does not list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutsideRule {
    /// Fixed value.
    Constant(u64),
    /// Value of the nearest listed argument.
    Clamp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GTable {
    entries: BTreeMap<i64, u64>,
    outside: OutsideRule,
}

impl GTable {
    pub fn new(entries: BTreeMap<i64, u64>, outside: OutsideRule) -> Result<Self, SchemeError> {
        if entries.is_empty() && outside == OutsideRule::Clamp {
            return Err(SchemeError::config(
                "clamp rule needs at least one table entry",
            ));
        }
        Ok(Self { entries, outside })
    }

    pub fn eval(&self, v: i64) -> u64 {
        if let Some(&g) = self.entries.get(&v) {
            return g;
        }
        match self.outside {
            OutsideRule::Constant(c) => c,
            OutsideRule::Clamp => {
                let below = self.entries.range(..v).next_back();
                let above = self.entries.range(v..).next();
                match (below, above) {
                    (Some((&lo, &glo)), Some((&hi, &ghi))) => {
                        if v - lo <= hi - v {
                            glo
                        } else {
                            ghi
                        }
                    }
                    (Some((_, &g)), None) | (None, Some((_, &g))) => g,
                    (None, None) => unreachable!("non-empty by construction"),
                }
            }
        }
    }

    fn max_value(&self) -> u64 {
        let listed = self.entries.values().copied().max().unwrap_or(0);
        match self.outside {
            OutsideRule::Constant(c) => listed.max(c),
            OutsideRule::Clamp => listed,
        }
    }

    /// Two-column ASCII `x g(x)`; a line `* <value>` or `* clamp` sets the
    /// rule for unlisted arguments (required). `#` starts a comment.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self, SchemeError> {
        let mut entries = BTreeMap::new();
        let mut outside = None;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(StreamError::from)?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: &str| {
                SchemeError::Stream(StreamError::Parse {
                    line: lineno + 1,
                    msg: msg.to_string(),
                })
            };
            let mut parts = body.split_whitespace();
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(err("expected two columns")),
            };
            if a == "*" {
                outside = Some(if b == "clamp" {
                    OutsideRule::Clamp
                } else {
                    OutsideRule::Constant(b.parse().map_err(|_| err("bad default value"))?)
                });
                continue;
            }
            let x: i64 = a.parse().map_err(|_| err("bad argument"))?;
            let g: u64 = b.parse().map_err(|_| err("bad value"))?;
            if entries.insert(x, g).is_some() {
                return Err(err("duplicate argument"));
            }
        }
        let outside = outside
            .ok_or_else(|| SchemeError::config("g table needs a `* <value>` or `* clamp` line"))?;
        Self::new(entries, outside)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GFn {
    /// `g ≡ 0`.
    Zero,
    /// `g(0) = 0`, `1` otherwise (F₀).
    NonZero,
    /// `g(x) = x²`.
    Square,
    /// `1` if `x < 0` (multiset inclusion).
    Negative,
    /// `1` if `x > pivot` (F∞ check).
    AbovePivot(i64),
    Table(GTable),
}

/// A function `g: Z → Z⁺` together with its range exponent `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GSpec {
    pub func: GFn,
    pub p: u32,
}

impl GSpec {
    pub fn new(func: GFn, p: u32) -> Self {
        Self { func, p }
    }

    pub fn zero() -> Self {
        Self::new(GFn::Zero, 0)
    }

    pub fn f0() -> Self {
        Self::new(GFn::NonZero, 0)
    }

    pub fn square(p: u32) -> Self {
        Self::new(GFn::Square, p)
    }

    pub fn negative() -> Self {
        Self::new(GFn::Negative, 0)
    }

    pub fn above(pivot: i64) -> Self {
        Self::new(GFn::AbovePivot(pivot), 0)
    }

    /// `x²` with the least `p` such that `m² ≤ n^p`.
    pub fn square_for(n: usize, m: u64) -> Self {
        let bound = (m as u128).pow(2);
        Self::square(least_exponent(n, bound))
    }

    /// A table with the least valid `p` for arguments in `[-m, m]`.
    pub fn table_for(table: GTable, n: usize) -> Self {
        let p = least_exponent(n, table.max_value() as u128);
        Self::new(GFn::Table(table), p)
    }

    #[inline]
    pub fn eval(&self, v: i64) -> u64 {
        match &self.func {
            GFn::Zero => 0,
            GFn::NonZero => (v != 0) as u64,
            GFn::Square => v.unsigned_abs().saturating_mul(v.unsigned_abs()),
            GFn::Negative => (v < 0) as u64,
            GFn::AbovePivot(p) => (v > *p) as u64,
            GFn::Table(t) => t.eval(v),
        }
    }

    /// `n^p`, saturating.
    pub fn bound(&self, n: usize) -> u128 {
        (n as u128).checked_pow(self.p).unwrap_or(u128::MAX)
    }

    /// Checks `g(v) ≤ n^p` for every `|v| ≤ m`.
    pub fn validate(&self, n: usize, m: u64) -> Result<(), SchemeError> {
        let bound = self.bound(n);
        let check = |v: i64| {
            let g = self.eval(v);
            if g as u128 > bound {
                Err(SchemeError::GContract {
                    arg: v,
                    value: g,
                    bound,
                })
            } else {
                Ok(())
            }
        };
        match &self.func {
            GFn::Zero | GFn::NonZero | GFn::Negative | GFn::AbovePivot(_) => check(1),
            // monotone in |v|
            GFn::Square => check(m as i64),
            GFn::Table(t) => {
                for &x in t.entries.keys() {
                    if x.unsigned_abs() <= m {
                        check(x)?;
                    }
                }
                check(m as i64)?;
                check(-(m as i64))
            }
        }
    }
}

/// Least `p` with `bound ≤ n^p`.
fn least_exponent(n: usize, bound: u128) -> u32 {
    if n <= 1 {
        return 0;
    }
    let mut p = 0u32;
    let mut pow = 1u128;
    while pow < bound {
        pow = pow.saturating_mul(n as u128);
        p += 1;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_values() {
        assert_eq!(GSpec::f0().eval(0), 0);
        assert_eq!(GSpec::f0().eval(-4), 1);
        assert_eq!(GSpec::square(2).eval(-7), 49);
        assert_eq!(GSpec::negative().eval(-1), 1);
        assert_eq!(GSpec::negative().eval(0), 0);
        assert_eq!(GSpec::above(3).eval(3), 0);
        assert_eq!(GSpec::above(3).eval(4), 1);
    }

    #[test]
    fn exponent_and_validation() {
        let g = GSpec::square_for(64, 256);
        assert_eq!(g.p, 3); // 65536 ≤ 64^3
        assert!(g.validate(64, 256).is_ok());
        assert!(GSpec::square(1).validate(64, 256).is_err());
    }

    #[test]
    fn table_parse_and_rules() {
        let src = "# cubes-ish\n-1 1\n0 0\n1 1\n2 8\n* clamp\n";
        let t = GTable::parse(src.as_bytes()).unwrap();
        assert_eq!(t.eval(2), 8);
        assert_eq!(t.eval(10), 8);
        assert_eq!(t.eval(-5), 1);
        let t = GTable::parse("0 0\n* 3\n".as_bytes()).unwrap();
        assert_eq!(t.eval(0), 0);
        assert_eq!(t.eval(9), 3);
        assert!(GTable::parse("0 0\n".as_bytes()).is_err());
        assert!(GTable::parse("0 0\n0 1\n* 1\n".as_bytes()).is_err());
        assert!(GTable::parse("0\n* 1\n".as_bytes()).is_err());
        let g = GSpec::table_for(GTable::parse("0 0\n* 100\n".as_bytes()).unwrap(), 10);
        assert_eq!(g.p, 2);
    }
}
