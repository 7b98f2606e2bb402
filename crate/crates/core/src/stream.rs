//! Turnstile streams: tokens, the 1D→2D shaping bijection, seeded
//! generators, and the exact brute-force oracle.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::StreamError;
use crate::gfun::GSpec;

/// RNG stream ids; every consumer of a run seed gets its own substream.
pub mod substream {
    pub const GENERATOR: u64 = 1;
    pub const VERIFIER: u64 = 2;
    pub const ADVERSARY: u64 = 3;
}

pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One unit update `(j, Δ)` with `Δ ∈ {-1, +1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StreamToken {
    pub index: u32,
    pub delta: i8,
}

impl StreamToken {
    pub fn new(index: u32, delta: i64) -> Result<Self, StreamError> {
        match delta {
            1 | -1 => Ok(Self {
                index,
                delta: delta as i8,
            }),
            d => Err(StreamError::BadDelta(d)),
        }
    }

    pub fn insert(index: u32) -> Self {
        Self { index, delta: 1 }
    }

    pub fn delete(index: u32) -> Self {
        Self { index, delta: -1 }
    }

    pub fn check(&self, n: usize) -> Result<(), StreamError> {
        if self.index == 0 || self.index as usize > n {
            return Err(StreamError::IndexOutOfRange {
                index: self.index as u64,
                n: n as u64,
            });
        }
        Ok(())
    }
}

/// Which multiset a token of an inclusion instance belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub side: Side,
    pub index: u32,
}

/// Row-major view of `[n]` as a `d1 × d2` grid, `d1 = ⌈n^{1/3}⌉`,
/// `d2 = ⌈n / d1⌉`. Cells past `n` are padding and always hold zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub n: usize,
    pub d1: usize,
    pub d2: usize,
}

/// Smallest `k` with `k^3 >= v`.
pub fn ceil_cbrt(v: u128) -> u128 {
    let mut k = (v as f64).cbrt() as u128;
    while k * k * k < v {
        k += 1;
    }
    while k > 0 && (k - 1) * (k - 1) * (k - 1) >= v {
        k -= 1;
    }
    k
}

impl ShapeParams {
    pub fn new(n: usize) -> Result<Self, StreamError> {
        if n == 0 {
            return Err(StreamError::IndexOutOfRange { index: 0, n: 0 });
        }
        let d1 = ceil_cbrt(n as u128) as usize;
        let d2 = n.div_ceil(d1);
        Ok(Self { n, d1, d2 })
    }

    pub fn cells(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn padding(&self) -> usize {
        self.cells() - self.n
    }

    /// `j ↦ (⌈j/d2⌉, j - (x-1)·d2)`, both 1-based.
    pub fn shape(&self, j: usize) -> Result<(usize, usize), StreamError> {
        if j == 0 || j > self.cells() {
            return Err(StreamError::IndexOutOfRange {
                index: j as u64,
                n: self.cells() as u64,
            });
        }
        Ok(self.shape_unchecked(j))
    }

    #[inline]
    pub(crate) fn shape_unchecked(&self, j: usize) -> (usize, usize) {
        let x = (j - 1) / self.d2 + 1;
        (x, j - (x - 1) * self.d2)
    }

    pub fn unshape(&self, x: usize, y: usize) -> usize {
        (x - 1) * self.d2 + y
    }
}

/// Dense frequency vector; the test oracle, never verifier state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyVector {
    pub n: usize,
    pub m: u64,
    freqs: Vec<i64>,
}

impl FrequencyVector {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            m: 0,
            freqs: vec![0; n],
        }
    }

    pub fn from_stream(n: usize, stream: &[StreamToken]) -> Result<Self, StreamError> {
        let mut fv = Self::zeros(n);
        for t in stream {
            fv.apply(t)?;
        }
        Ok(fv)
    }

    pub fn apply(&mut self, t: &StreamToken) -> Result<(), StreamError> {
        t.check(self.n)?;
        self.freqs[t.index as usize - 1] += t.delta as i64;
        self.m += 1;
        Ok(())
    }

    /// `f_j` for 1-based `j`.
    pub fn get(&self, j: usize) -> i64 {
        self.freqs[j - 1]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.freqs
    }

    pub fn l1(&self) -> u64 {
        self.freqs.iter().map(|f| f.unsigned_abs()).sum()
    }

    /// `(j, f_j)` over nonzero entries, ascending `j`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.freqs
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != 0)
            .map(|(i, &f)| (i + 1, f))
    }

    /// Largest frequency and the smallest index attaining it.
    pub fn argmax(&self) -> (usize, i64) {
        let mut best = (1, self.freqs[0]);
        for (i, &f) in self.freqs.iter().enumerate().skip(1) {
            if f > best.1 {
                best = (i + 1, f);
            }
        }
        best
    }
}

/// `G(f) = Σ_j g(f_j)` in exact integer arithmetic.
pub fn exact_oracle(n: usize, stream: &[StreamToken], g: &GSpec) -> Result<i128, StreamError> {
    let fv = FrequencyVector::from_stream(n, stream)?;
    Ok(fv.as_slice().iter().map(|&f| g.eval(f) as i128).sum())
}

/// Turns an inclusion instance into the signed stream `f = Y - X`.
pub fn multiset_to_stream(tokens: &[TaggedToken]) -> Vec<StreamToken> {
    tokens
        .iter()
        .map(|t| match t.side {
            Side::X => StreamToken::delete(t.index),
            Side::Y => StreamToken::insert(t.index),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// Insertions of uniformly random indices.
    UniformInsert,
    /// Insertions drawn from a Zipf(1.1) law over `[n]`.
    ZipfInsert,
    /// Random ±1 updates with `‖f‖₁` held at or below `n`.
    TurnstileBalanced,
    /// Insert/cancel pairs; `‖f‖₁ ≤ min(n, m/5)` regardless of `m`.
    HeavyCancellation,
}

impl GenKind {
    pub const ALL: [GenKind; 4] = [
        GenKind::UniformInsert,
        GenKind::ZipfInsert,
        GenKind::TurnstileBalanced,
        GenKind::HeavyCancellation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GenKind::UniformInsert => "uniform",
            GenKind::ZipfInsert => "zipf",
            GenKind::TurnstileBalanced => "turnstile",
            GenKind::HeavyCancellation => "cancel",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenKind {
    type Err = StreamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "uniform" | "uniform-insert" => GenKind::UniformInsert,
            "zipf" | "zipf-insert" => GenKind::ZipfInsert,
            "turnstile" | "turnstile-balanced" => GenKind::TurnstileBalanced,
            "cancel" | "heavy-cancellation" => GenKind::HeavyCancellation,
            other => return Err(StreamError::UnknownGenerator(other.to_string())),
        })
    }
}

/// Deterministic stream of `m` unit tokens over `[n]`.
pub fn gen_stream(kind: GenKind, n: usize, m: usize, seed: u64) -> Vec<StreamToken> {
    assert!(n >= 1, "universe must be non-empty");
    let mut rng = seeded_rng(seed, substream::GENERATOR);
    let mut out = Vec::with_capacity(m);
    let pick = |rng: &mut ChaCha8Rng| rng.random_range(1..=n as u32);
    match kind {
        GenKind::UniformInsert => {
            out.extend((0..m).map(|_| StreamToken::insert(pick(&mut rng))));
        }
        GenKind::ZipfInsert => {
            let zipf = Zipf::new(n as f64, 1.1).expect("valid zipf parameters");
            out.extend((0..m).map(|_| {
                let j = zipf.sample(&mut rng) as u32;
                StreamToken::insert(j.clamp(1, n as u32))
            }));
        }
        GenKind::TurnstileBalanced => {
            let cap = n as u64;
            let mut f = vec![0i64; n + 1];
            let mut l1 = 0u64;
            for _ in 0..m {
                let mut j = pick(&mut rng);
                let mut delta: i64 = if rng.random_bool(0.5) { 1 } else { -1 };
                let grows = (f[j as usize] + delta).abs() > f[j as usize].abs();
                if grows && l1 >= cap {
                    while f[j as usize] == 0 {
                        j = pick(&mut rng);
                    }
                    delta = -f[j as usize].signum();
                }
                let before = f[j as usize].unsigned_abs();
                f[j as usize] += delta;
                l1 = l1 + f[j as usize].unsigned_abs() - before;
                out.push(StreamToken {
                    index: j,
                    delta: delta as i8,
                });
            }
        }
        GenKind::HeavyCancellation => {
            let cap = (m / 5).clamp(1, n);
            let mut pending: Vec<StreamToken> = Vec::with_capacity(cap);
            for _ in 0..m {
                let create = if pending.is_empty() {
                    true
                } else if pending.len() >= cap {
                    false
                } else {
                    rng.random_bool(0.5)
                };
                if create {
                    let t = StreamToken {
                        index: pick(&mut rng),
                        delta: if rng.random_bool(0.5) { 1 } else { -1 },
                    };
                    pending.push(t);
                    out.push(t);
                } else {
                    let i = rng.random_range(0..pending.len());
                    let t = pending.swap_remove(i);
                    out.push(StreamToken {
                        index: t.index,
                        delta: -t.delta,
                    });
                }
            }
        }
    }
    out
}

/// Random inclusion instance: `|X| ≈ |Y| ≈ size`, interleaved. Roughly half
/// of the seeds produce `X ⊆ Y`.
pub fn gen_multiset(n: usize, size: usize, seed: u64) -> Vec<TaggedToken> {
    let mut rng = seeded_rng(seed, substream::GENERATOR);
    let hi = (n as u32).clamp(1, 8.max(n as u32 / 4));
    let mut y: Vec<u32> = (0..size).map(|_| rng.random_range(1..=hi)).collect();
    let mut x: Vec<u32> = if rng.random_bool(0.5) {
        // subset of Y
        y.iter().copied().filter(|_| rng.random_bool(0.8)).collect()
    } else {
        (0..size).map(|_| rng.random_range(1..=hi)).collect()
    };
    let mut tagged: Vec<TaggedToken> = x
        .drain(..)
        .map(|index| TaggedToken {
            side: Side::X,
            index,
        })
        .chain(y.drain(..).map(|index| TaggedToken {
            side: Side::Y,
            index,
        }))
        .collect();
    // Fisher-Yates interleave
    for i in (1..tagged.len()).rev() {
        let k = rng.random_range(0..=i);
        tagged.swap(i, k);
    }
    tagged
}

/// Parses the ASCII stream format: one `j delta` per line. Blank lines and
/// `#` comments are ignored; `|delta| > 1` is expanded into unit tokens.
pub fn read_stream<R: BufRead>(reader: R) -> Result<Vec<StreamToken>, StreamError> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: &str| StreamError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let mut parts = body.split_whitespace();
        let j: u32 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err("expected index"))?;
        let delta: i64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err("expected delta"))?;
        if parts.next().is_some() {
            return Err(err("trailing fields"));
        }
        if delta == 0 {
            return Err(err("zero delta"));
        }
        let unit = StreamToken::new(j, delta.signum())?;
        out.extend(std::iter::repeat_n(unit, delta.unsigned_abs() as usize));
    }
    Ok(out)
}

pub fn write_stream<W: Write>(mut w: W, stream: &[StreamToken]) -> std::io::Result<()> {
    for t in stream {
        writeln!(w, "{} {}", t.index, t.delta)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shape_examples() {
        let s = ShapeParams::new(8).unwrap();
        assert_eq!((s.d1, s.d2), (2, 4));
        assert_eq!(s.shape(1).unwrap(), (1, 1));
        assert_eq!(s.shape(5).unwrap(), (2, 1));
        assert_eq!(s.shape(8).unwrap(), (2, 4));
        assert!(s.shape(0).is_err());
        assert!(s.shape(9).is_err());
    }

    #[test]
    fn shape_dimensions() {
        for (n, d1, d2) in [
            (1, 1, 1),
            (2, 2, 1),
            (27, 3, 9),
            (28, 4, 7),
            (512, 8, 64),
            (4096, 16, 256),
        ] {
            let s = ShapeParams::new(n).unwrap();
            assert_eq!((s.d1, s.d2), (d1, d2), "n = {n}");
        }
        assert_eq!(ShapeParams::new(1 << 18).unwrap().d1, 64);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(exact_oracle(4, &[], &GSpec::f0()).unwrap(), 0);
        let s = [
            StreamToken::insert(1),
            StreamToken::insert(1),
            StreamToken::insert(2),
            StreamToken::delete(2),
        ];
        assert_eq!(exact_oracle(4, &s, &GSpec::f0()).unwrap(), 1);
        assert!(exact_oracle(1, &s, &GSpec::f0()).is_err());
    }

    #[test]
    fn oracle_square_matches_independent_tally() {
        let n = 64;
        let s = gen_stream(GenKind::TurnstileBalanced, n, 1000, 11);
        let mut tally = std::collections::HashMap::<u32, i64>::new();
        for t in &s {
            *tally.entry(t.index).or_default() += t.delta as i64;
        }
        let expect: i128 = tally.values().map(|&v| (v * v) as i128).sum();
        assert_eq!(exact_oracle(n, &s, &GSpec::square(2)).unwrap(), expect);
    }

    #[test]
    fn generator_contracts() {
        assert!(gen_stream(GenKind::UniformInsert, 10, 0, 1).is_empty());
        for kind in GenKind::ALL {
            assert_eq!(gen_stream(kind, 50, 300, 9), gen_stream(kind, 50, 300, 9));
            assert_eq!(kind.name().parse::<GenKind>().unwrap(), kind);
        }
        assert!("bogus".parse::<GenKind>().is_err());
        let s = gen_stream(GenKind::HeavyCancellation, 64, 640, 3);
        let fv = FrequencyVector::from_stream(64, &s).unwrap();
        assert!(fv.l1() <= 128);
    }

    #[test]
    fn stream_file_roundtrip_and_expansion() {
        let s = gen_stream(GenKind::TurnstileBalanced, 20, 50, 4);
        let mut buf = Vec::new();
        write_stream(&mut buf, &s).unwrap();
        assert_eq!(read_stream(&buf[..]).unwrap(), s);
        let parsed = read_stream("# header\n3 2\n\n1 -1\n".as_bytes()).unwrap();
        assert_eq!(
            parsed,
            vec![
                StreamToken::insert(3),
                StreamToken::insert(3),
                StreamToken::delete(1)
            ]
        );
        assert!(read_stream("3 0\n".as_bytes()).is_err());
        assert!(read_stream("x 1\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn shape_unshape_inverse(n in 1usize..5000) {
            let s = ShapeParams::new(n).unwrap();
            prop_assert!(s.cells() >= n && s.padding() < s.d2);
            for j in 1..=s.cells() {
                let (x, y) = s.shape(j).unwrap();
                prop_assert!((1..=s.d1).contains(&x) && (1..=s.d2).contains(&y));
                prop_assert_eq!(s.unshape(x, y), j);
            }
        }

        #[test]
        fn generated_streams_respect_l1(kind_ix in 0usize..4, n in 1usize..100, m in 0usize..600, seed in any::<u64>()) {
            let kind = GenKind::ALL[kind_ix];
            let s = gen_stream(kind, n, m, seed);
            prop_assert_eq!(s.len(), m);
            let fv = FrequencyVector::from_stream(n, &s).unwrap();
            prop_assert!(fv.l1() <= m as u64);
            if kind == GenKind::TurnstileBalanced {
                prop_assert!(fv.l1() <= n as u64);
            }
        }

        #[test]
        fn heavy_cancellation_is_cancellation_heavy(n in 1usize..200, factor in 5usize..20, seed in any::<u64>()) {
            let m = factor * n;
            let s = gen_stream(GenKind::HeavyCancellation, n, m, seed);
            let fv = FrequencyVector::from_stream(n, &s).unwrap();
            prop_assert!(m as u64 > 4 * fv.l1());
            prop_assert!(fv.l1() <= 2 * n as u64);
        }
    }
}
