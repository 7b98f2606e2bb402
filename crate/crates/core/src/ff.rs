//! Prime-field arithmetic over `F_q` for `q < 2^63`, plus the univariate
//! polynomial helpers the schemes are built from.
//!
//! Elements are kept in Montgomery form (`a·2^64 mod q`) so multiplication
//! is a single 128-bit product followed by one REDC step. The representation
//! is private; use [`Field::elem`], [`Field::from_i64`] and [`Field::value`]
//! to move between integers and field elements.

use std::fmt;

use crate::error::FieldError;

/// Largest modulus the arithmetic supports (exclusive).
pub const MAX_MODULUS: u64 = 1 << 63;

/// Largest lower bound accepted by [`find_prime`] (exclusive).
pub const MAX_PRIME_SEARCH: u64 = 1 << 62;

/// An element of `F_q` in Montgomery form.
///
/// Only meaningful together with the [`Field`] that produced it.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Fe(u64);

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe(m:{})", self.0)
    }
}

/// Arithmetic context for the prime field `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    q: u64,
    bits: u32,
    /// `-q^{-1} mod 2^64`
    qinv_neg: u64,
    /// `2^128 mod q`
    r2: u64,
    /// `2^64 mod q`, the Montgomery image of 1
    one: u64,
}

impl Field {
    /// Builds the context for a prime modulus `q` (checked).
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if q <= 2 || q >= MAX_MODULUS {
            return Err(FieldError::ModulusOutOfRange(q));
        }
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        let mut inv: u64 = q;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        debug_assert_eq!(q.wrapping_mul(inv), 1);
        let one = ((1u128 << 64) % q as u128) as u64;
        let r2 = ((one as u128 * one as u128) % q as u128) as u64;
        Ok(Self {
            q,
            bits: 64 - q.leading_zeros(),
            qinv_neg: inv.wrapping_neg(),
            r2,
            one,
        })
    }

    /// The modulus `q`.
    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `⌈log₂ q⌉`, the space one element occupies in the cost model.
    #[inline]
    pub fn bits_per_elem(&self) -> u32 {
        self.bits
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.qinv_neg);
        let s = (t + m as u128 * self.q as u128) >> 64;
        let s = s as u64;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        Fe(0)
    }

    #[inline]
    pub fn one(&self) -> Fe {
        Fe(self.one)
    }

    /// Embeds an unsigned integer (reduced mod `q`).
    #[inline]
    pub fn elem(&self, v: u64) -> Fe {
        let v = if v >= self.q { v % self.q } else { v };
        Fe(self.redc(v as u128 * self.r2 as u128))
    }

    /// Embeds a signed integer; negatives map to `q - |v|`.
    #[inline]
    pub fn from_i64(&self, v: i64) -> Fe {
        let e = self.elem(v.unsigned_abs());
        if v < 0 {
            self.neg(e)
        } else {
            e
        }
    }

    /// Embeds a canonical residue, rejecting values `>= q`.
    pub fn from_canonical(&self, v: u64) -> Option<Fe> {
        (v < self.q).then(|| self.elem(v))
    }

    /// Canonical residue in `[0, q)`.
    #[inline]
    pub fn value(&self, a: Fe) -> u64 {
        self.redc(a.0 as u128)
    }

    /// Lifts a residue to the signed integer of least absolute value.
    pub fn to_signed(&self, a: Fe) -> i64 {
        let v = self.value(a);
        if v <= self.q / 2 {
            v as i64
        } else {
            -((self.q - v) as i64)
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let s = a.0 + b.0;
        Fe(if s >= self.q { s - self.q } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        Fe(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.q - b.0
        })
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(if a.0 == 0 { 0 } else { self.q - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.redc(a.0 as u128 * b.0 as u128))
    }

    #[inline]
    pub fn square(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat.
    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::InverseOfZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Inverts every element of `xs` with a single exponentiation.
    pub fn batch_inv(&self, xs: &[Fe]) -> Result<Vec<Fe>, FieldError> {
        let mut prefix = Vec::with_capacity(xs.len());
        let mut acc = self.one();
        for &x in xs {
            if x.0 == 0 {
                return Err(FieldError::InverseOfZero);
            }
            prefix.push(acc);
            acc = self.mul(acc, x);
        }
        let mut inv = self.inv(acc)?;
        let mut out = vec![Fe(0); xs.len()];
        for i in (0..xs.len()).rev() {
            out[i] = self.mul(inv, prefix[i]);
            inv = self.mul(inv, xs[i]);
        }
        Ok(out)
    }

    /// Reduces `Σ aᵢ·kᵢ` where `aᵢ` are raw Montgomery words and `kᵢ` small
    /// integers. Linear in the Montgomery image, so the result is already
    /// in Montgomery form.
    #[inline]
    pub(crate) fn reduce_mont_i128(&self, acc: i128) -> Fe {
        let r = acc.rem_euclid(self.q as i128);
        Fe(r as u64)
    }

    #[inline]
    pub(crate) fn raw(a: Fe) -> u64 {
        a.0
    }

    /// Little-endian 8-byte wire encoding of the canonical residue.
    pub fn encode(&self, a: Fe) -> [u8; 8] {
        self.value(a).to_le_bytes()
    }
}

// ---------------------------------------------------------------------------
// Primes

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `q` with `lo < q < 2·lo`.
pub fn find_prime(lo: u64) -> Result<Field, FieldError> {
    if !(2..MAX_PRIME_SEARCH).contains(&lo) {
        return Err(FieldError::PrimeSearchOutOfRange(lo));
    }
    let mut q = lo + 1;
    while !is_prime(q) {
        q += 1;
    }
    debug_assert!(q < 2 * lo);
    Field::new(q)
}

// ---------------------------------------------------------------------------
// Polynomials

/// Dense univariate polynomial; `coeffs[i]` is the coefficient of `X^i`.
///
/// The declared degree bound is `coeffs.len() - 1`; trailing zeros are kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DensePoly {
    pub coeffs: Vec<Fe>,
}

impl DensePoly {
    pub fn new(coeffs: Vec<Fe>) -> Self {
        Self { coeffs }
    }

    pub fn zero(degree_bound: usize) -> Self {
        Self {
            coeffs: vec![Fe(0); degree_bound + 1],
        }
    }

    /// `None` for the empty coefficient list.
    pub fn degree_bound(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.0 == 0)
    }

    /// Zero-pads up to `degree_bound + 1` coefficients.
    pub fn padded(mut self, degree_bound: usize) -> Self {
        if self.coeffs.len() < degree_bound + 1 {
            self.coeffs.resize(degree_bound + 1, Fe(0));
        }
        self
    }

    /// Wire form: u32 LE length, then 8-byte LE canonical coefficients.
    pub fn encode_into(&self, field: &Field, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.coeffs.len() as u32).to_le_bytes());
        for &c in &self.coeffs {
            out.extend_from_slice(&field.encode(c));
        }
    }

    pub fn encoded_len(&self) -> usize {
        4 + 8 * self.coeffs.len()
    }
}

/// Horner evaluation.
pub fn eval_poly(field: &Field, p: &DensePoly, x: Fe) -> Fe {
    p.coeffs
        .iter()
        .rev()
        .fold(field.zero(), |acc, &c| field.add(field.mul(acc, x), c))
}

/// Evaluates a polynomial at a fixed set of points while its coefficients
/// arrive one at a time in ascending-degree order.
#[derive(Clone, Debug)]
pub struct StreamingEval {
    points: Vec<Fe>,
    powers: Vec<Fe>,
    accs: Vec<Fe>,
    seen: usize,
}

impl StreamingEval {
    pub fn new(field: &Field, points: Vec<Fe>) -> Self {
        let k = points.len();
        Self {
            points,
            powers: vec![field.one(); k],
            accs: vec![field.zero(); k],
            seen: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, field: &Field, coeff: Fe) {
        for ((acc, pw), &x) in self
            .accs
            .iter_mut()
            .zip(self.powers.iter_mut())
            .zip(&self.points)
        {
            *acc = field.add(*acc, field.mul(coeff, *pw));
            *pw = field.mul(*pw, x);
        }
        self.seen += 1;
    }

    pub fn values(&self) -> &[Fe] {
        &self.accs
    }

    pub fn coefficients_seen(&self) -> usize {
        self.seen
    }

    /// Field elements held: points, running powers, accumulators.
    pub fn elems_held(&self) -> usize {
        3 * self.points.len()
    }
}

/// Lagrange interpolation through `points` (pairwise-distinct abscissae).
///
/// Returns the unique polynomial of degree `< points.len()`, with exactly
/// `points.len()` coefficients. Quadratic time.
pub fn interpolate(field: &Field, points: &[(Fe, Fe)]) -> Result<DensePoly, FieldError> {
    let k = points.len();
    if k == 0 {
        return Ok(DensePoly::new(Vec::new()));
    }
    // master(X) = Π (X - xᵢ), degree k
    let mut master = vec![field.zero(); k + 1];
    master[0] = field.one();
    for (i, &(xi, _)) in points.iter().enumerate() {
        // multiply current degree-i poly by (X - xi)
        for j in (0..=i + 1).rev() {
            let shifted = if j > 0 { master[j - 1] } else { field.zero() };
            master[j] = field.sub(shifted, field.mul(xi, master[j]));
        }
    }
    // denominators Π_{j≠i} (xᵢ - xⱼ)
    let mut denoms = Vec::with_capacity(k);
    for (i, &(xi, _)) in points.iter().enumerate() {
        let mut d = field.one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i != j {
                let diff = field.sub(xi, xj);
                if diff == field.zero() {
                    return Err(FieldError::DuplicateAbscissa(field.value(xi)));
                }
                d = field.mul(d, diff);
            }
        }
        denoms.push(d);
    }
    let inv = field.batch_inv(&denoms)?;
    let mut out = vec![field.zero(); k];
    let mut quot = vec![field.zero(); k];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let scale = field.mul(yi, inv[i]);
        if scale == field.zero() {
            continue;
        }
        // synthetic division master / (X - xi)
        let mut carry = master[k];
        for j in (0..k).rev() {
            quot[j] = carry;
            carry = field.add(master[j], field.mul(carry, xi));
        }
        for (o, &c) in out.iter_mut().zip(&quot) {
            *o = field.add(*o, field.mul(scale, c));
        }
    }
    Ok(DensePoly::new(out))
}

/// `[L₁(r), …, L_d(r)]`, the degree-`(d-1)` Lagrange basis over the grid
/// `{1, …, d}` evaluated at `r`. Linear time.
pub fn lagrange_row_weights(field: &Field, r: Fe, d: usize) -> Result<Vec<Fe>, FieldError> {
    if d == 0 || d as u64 >= field.modulus() {
        return Err(FieldError::GridTooLarge {
            d: d as u64,
            q: field.modulus(),
        });
    }
    let rv = field.value(r);
    if (1..=d as u64).contains(&rv) {
        let mut w = vec![field.zero(); d];
        w[rv as usize - 1] = field.one();
        return Ok(w);
    }
    // diffs[k] = r - (k+1)
    let diffs: Vec<Fe> = (1..=d as u64)
        .map(|k| field.sub(r, field.elem(k)))
        .collect();
    let mut prefix = vec![field.one(); d + 1];
    for k in 0..d {
        prefix[k + 1] = field.mul(prefix[k], diffs[k]);
    }
    let mut suffix = vec![field.one(); d + 1];
    for k in (0..d).rev() {
        suffix[k] = field.mul(suffix[k + 1], diffs[k]);
    }
    // denominator for node x (1-based): (x-1)! · (d-x)! · (-1)^{d-x}
    let mut fact = vec![field.one(); d];
    for k in 1..d {
        fact[k] = field.mul(fact[k - 1], field.elem(k as u64));
    }
    let denoms: Vec<Fe> = (0..d)
        .map(|i| {
            let v = field.mul(fact[i], fact[d - 1 - i]);
            if (d - 1 - i) % 2 == 1 {
                field.neg(v)
            } else {
                v
            }
        })
        .collect();
    let inv = field.batch_inv(&denoms)?;
    Ok((0..d)
        .map(|i| field.mul(field.mul(prefix[i], suffix[i + 1]), inv[i]))
        .collect())
}
