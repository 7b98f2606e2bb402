use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::SchemeError;
use crate::ff::{find_prime, Field};
use crate::gfun::GSpec;
use crate::stream::{ceil_cbrt, ShapeParams};
use crate::summaries::CountMedianConfig;

/// Which summary backs the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Extended Misra-Gries; perfectly complete, needs `m ≤ m_cap = O(n)`.
    Emg,
    /// Count-Median; needs only `‖f‖₁ ≤ c·n`, completeness error ≤ 1/4.
    #[serde(rename = "cm")]
    CountMedian,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Emg => "emg",
            Variant::CountMedian => "cm",
        })
    }
}

impl FromStr for Variant {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "emg" => Ok(Variant::Emg),
            "cm" | "count-median" => Ok(Variant::CountMedian),
            other => Err(SchemeError::config(format!("unknown variant `{other}`"))),
        }
    }
}

/// User-facing knobs; [`SchemeParams::new`] derives everything else.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub n: usize,
    pub variant: Variant,
    /// Hard cap on stream length.
    pub m_cap: u64,
    /// Stream-length constant: `m ≤ c·n` (EMG) or `‖f‖₁ ≤ c·n` (CM).
    pub c: u64,
    /// Summary counters per copy; default `⌈n^{2/3}⌉`.
    pub capacity: Option<usize>,
    /// Forces a specific prime modulus (small-field soundness experiments).
    pub field_override: Option<u64>,
    /// Target failure probability of the Count-Median sketch.
    pub cm_epsilon: f64,
}

impl SchemeConfig {
    pub const DEFAULT_C: u64 = 4;

    /// EMG variant with `m_cap = c·n`.
    pub fn emg(n: usize, c: u64) -> Self {
        Self {
            n,
            variant: Variant::Emg,
            m_cap: c.saturating_mul(n as u64),
            c,
            capacity: None,
            field_override: None,
            cm_epsilon: 0.25,
        }
    }

    /// Count-Median variant for streams of length up to `m_cap` with
    /// `‖f‖₁ ≤ c·n`.
    pub fn count_median(n: usize, m_cap: u64, c: u64) -> Self {
        Self {
            variant: Variant::CountMedian,
            m_cap,
            ..Self::emg(n, c)
        }
    }

    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = Some(capacity);
        self
    }

    pub fn with_field(mut self, q: u64) -> Self {
        self.field_override = Some(q);
        self
    }
}

/// Everything both parties agree on before the stream starts.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub n: usize,
    pub variant: Variant,
    pub shape: ShapeParams,
    pub m_cap: u64,
    pub c: u64,
    pub capacity: usize,
    /// Small-frequency band radius `B`: every unclaimed `|f_j| ≤ B`.
    pub band: u64,
    pub field: Field,
    /// Declared degree bound of `P'`.
    pub deg_p: usize,
    /// Declared degree bound of `Q'`.
    pub deg_q: usize,
    /// Largest claimed set the verifier accepts.
    pub claim_cap: usize,
    pub cm: Option<CountMedianConfig>,
}

impl SchemeParams {
    /// Derives parameters for computing `G` built from `g` (whose range
    /// exponent bounds the field size).
    pub fn new(cfg: &SchemeConfig, g: &GSpec) -> Result<Self, SchemeError> {
        let n = cfg.n;
        if n == 0 {
            return Err(SchemeError::config("n must be positive"));
        }
        if n > u32::MAX as usize {
            return Err(SchemeError::config("n must fit in 32 bits"));
        }
        if cfg.c == 0 {
            return Err(SchemeError::config("c must be positive"));
        }
        let shape = ShapeParams::new(n)?;
        let capacity = match cfg.capacity {
            Some(0) => return Err(SchemeError::config("capacity must be positive")),
            Some(k) => k,
            None => ceil_cbrt((n as u128) * (n as u128)) as usize,
        };
        let cap64 = capacity as u64;
        let (band, cm, claim_cap) = match cfg.variant {
            Variant::Emg => (cfg.m_cap.div_ceil(cap64), None, 2 * capacity + 1),
            Variant::CountMedian => {
                let l1_cap = cfg.c.saturating_mul(n as u64);
                let band = l1_cap.div_ceil(cap64).max(1);
                if !(cfg.cm_epsilon > 0.0 && cfg.cm_epsilon < 1.0) {
                    return Err(SchemeError::config("cm epsilon must lie in (0, 1)"));
                }
                let cm = CountMedianConfig::new(1.0 / (4.0 * capacity as f64), cfg.cm_epsilon);
                // |f_j| ≥ B/2 holds for at most 2‖f‖₁/B keys
                let heavy = (2 * l1_cap / band) as usize;
                (band, Some(cm), heavy.min(n) + 1)
            }
        };
        let d1 = shape.d1;
        let deg_p = (2 * band as usize + 1) * (d1 - 1) + (d1 - 1);
        let deg_q = 3 * (d1 - 1);
        g.validate(n, cfg.m_cap)?;

        let need_interp = (deg_p as u64 + 1).max(2 * band + 1).max(d1 as u64);
        let field = match cfg.field_override {
            Some(q) => {
                let field = Field::new(q)?;
                if q <= need_interp {
                    return Err(SchemeError::config(format!(
                        "field override {q} too small: need q > {need_interp}"
                    )));
                }
                field
            }
            None => find_prime(Self::field_lower_bound(
                n,
                shape,
                cfg.m_cap,
                g,
                need_interp,
            )?)?,
        };
        Ok(Self {
            n,
            variant: cfg.variant,
            shape,
            m_cap: cfg.m_cap,
            c: cfg.c,
            capacity,
            band,
            field,
            deg_p,
            deg_q,
            claim_cap,
            cm,
        })
    }

    /// `max(n^{p+1}, 4·n·m² + 1, d1·d2·n^p + 1, interpolation needs + 1)`.
    fn field_lower_bound(
        n: usize,
        shape: ShapeParams,
        m_cap: u64,
        g: &GSpec,
        need_interp: u64,
    ) -> Result<u64, SchemeError> {
        let too_big = || SchemeError::config("parameters need a modulus beyond 2^62");
        let n128 = n as u128;
        let np = n128.checked_pow(g.p).ok_or_else(too_big)?;
        let candidates = [
            np.checked_mul(n128).ok_or_else(too_big)?,
            (m_cap as u128)
                .checked_mul(m_cap as u128)
                .and_then(|v| v.checked_mul(4 * n128))
                .ok_or_else(too_big)?
                + 1,
            np.checked_mul(shape.cells() as u128).ok_or_else(too_big)? + 1,
            need_interp as u128 + 1,
            2,
        ];
        let lo = candidates.into_iter().max().unwrap_or(2);
        if lo >= crate::ff::MAX_PRIME_SEARCH as u128 {
            return Err(too_big());
        }
        Ok(lo as u64)
    }

    /// Grid cells past `n`, each contributing `g(0)` to the light sum.
    pub fn padding(&self) -> u64 {
        self.shape.padding() as u64
    }

    /// Exact byte length of an honest help message with `claims` claims.
    pub fn help_len(&self, claims: usize) -> usize {
        4 + 4 + 12 * claims + 4 + 8 * (self.deg_p + 1) + 4 + 8 * (self.deg_q + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emg_defaults() {
        let p = SchemeParams::new(&SchemeConfig::emg(512, 4), &GSpec::f0()).unwrap();
        assert_eq!((p.shape.d1, p.shape.d2), (8, 64));
        assert_eq!(p.capacity, 64);
        assert_eq!(p.band, 32);
        assert_eq!(p.deg_p, 65 * 7 + 7);
        assert_eq!(p.deg_q, 21);
        let q = p.field.modulus();
        assert!(q > 4 * 512 * 2048u64.pow(2));
        assert!(q < 2 * (4 * 512 * 2048u64.pow(2) + 1));
    }

    #[test]
    fn capacity_default_is_ceil_two_thirds_power() {
        for (n, k) in [
            (1, 1),
            (8, 4),
            (27, 9),
            (28, 10),
            (4096, 256),
            (1 << 18, 4096),
        ] {
            let p = SchemeParams::new(&SchemeConfig::emg(n, 1), &GSpec::f0()).unwrap();
            assert_eq!(p.capacity, k, "n = {n}");
        }
    }

    #[test]
    fn count_median_band_and_sketch() {
        let p = SchemeParams::new(&SchemeConfig::count_median(512, 5120, 2), &GSpec::f0()).unwrap();
        assert_eq!(p.band, 16);
        let cm = p.cm.unwrap();
        assert_eq!(cm.width(), 512);
        // error bound φ·c·n stays within B/4
        assert!(cm.phi * 1024.0 <= p.band as f64 / 4.0);
        assert!(p.field.modulus() > 4 * 512 * 5120u64.pow(2));
    }

    #[test]
    fn field_covers_g_range_with_padding() {
        let g = GSpec::square_for(28, 112);
        let p = SchemeParams::new(&SchemeConfig::emg(28, 4), &g).unwrap();
        let max_g = g.bound(28);
        assert!(p.field.modulus() as u128 > p.shape.cells() as u128 * max_g);
    }

    #[test]
    fn config_errors() {
        let g = GSpec::f0();
        assert!(SchemeParams::new(&SchemeConfig::emg(0, 4), &g).is_err());
        assert!(SchemeParams::new(&SchemeConfig::emg(10, 0), &g).is_err());
        assert!(SchemeParams::new(&SchemeConfig::emg(10, 4).with_capacity(0), &g).is_err());
        assert!(SchemeParams::new(&SchemeConfig::emg(27, 4).with_field(100), &g).is_err());
        assert!(SchemeParams::new(&SchemeConfig::emg(27, 4).with_field(13), &g).is_err());
        assert!(SchemeParams::new(&SchemeConfig::emg(27, 4).with_field(101), &g).is_ok());
        assert!(SchemeParams::new(&SchemeConfig::emg(27, 4), &GSpec::square(1)).is_err());
        // 4·n·m² overflows the supported modulus range
        assert!(SchemeParams::new(&SchemeConfig::emg(1 << 24, 4), &g).is_err());
    }
}
