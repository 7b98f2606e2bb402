//! Low-degree-extension fingerprints of the shaped frequency grid.
//!
//! The verifier fixes a secret `r` and keeps the row `f̃(r, y)` for every
//! grid column `y`. Because `y` ranges over grid points, the `Y` factor of
//! each basis polynomial is a Kronecker delta and a token touches exactly
//! one entry of the row.

use crate::error::FieldError;
use crate::ff::{lagrange_row_weights, Fe, Field};
use crate::stream::{FrequencyVector, ShapeParams, StreamToken};

/// The streamed fingerprint row `f̃(r, ·)`.
#[derive(Clone, Debug)]
pub struct LdeRow {
    r: Fe,
    shape: ShapeParams,
    weights: Vec<Fe>,
    row: Vec<Fe>,
}

impl LdeRow {
    pub fn new(field: &Field, shape: ShapeParams, r: Fe) -> Result<Self, FieldError> {
        Ok(Self {
            r,
            shape,
            weights: lagrange_row_weights(field, r, shape.d1)?,
            row: vec![field.zero(); shape.d2],
        })
    }

    pub fn point(&self) -> Fe {
        self.r
    }

    /// `[L₁(r), …, L_{d1}(r)]`.
    pub fn weights(&self) -> &[Fe] {
        &self.weights
    }

    pub fn row(&self) -> &[Fe] {
        &self.row
    }

    /// The caller guarantees `token.index ∈ [n]`.
    #[inline]
    pub fn update(&mut self, field: &Field, token: &StreamToken) {
        let (x, y) = self.shape.shape_unchecked(token.index as usize);
        let w = self.weights[x - 1];
        let e = &mut self.row[y - 1];
        *e = if token.delta > 0 {
            field.add(*e, w)
        } else {
            field.sub(*e, w)
        };
    }

    /// Row, weights and the point itself.
    pub fn size_bits(&self, field: &Field) -> u64 {
        (self.row.len() + self.weights.len() + 1) as u64 * field.bits_per_elem() as u64
    }
}

/// Incrementally builds `1 - h̃(r, ·)` (the LDE of the claimed-set indicator)
/// and `f̃'(r, ·)` as claims arrive.
#[derive(Clone, Debug)]
pub struct ClaimRows {
    shape: ShapeParams,
    in_set: Vec<Fe>,
    claimed: Vec<Fe>,
}

impl ClaimRows {
    pub fn new(field: &Field, shape: ShapeParams) -> Self {
        Self {
            shape,
            in_set: vec![field.zero(); shape.d2],
            claimed: vec![field.zero(); shape.d2],
        }
    }

    /// Adds key `j ∈ [d1·d2]` with claimed value `v`.
    pub fn push(&mut self, field: &Field, weights: &[Fe], j: usize, v: Fe) {
        let (x, y) = self.shape.shape_unchecked(j);
        let w = weights[x - 1];
        self.in_set[y - 1] = field.add(self.in_set[y - 1], w);
        self.claimed[y - 1] = field.add(self.claimed[y - 1], field.mul(v, w));
    }

    /// `1 - h̃(r, y)`.
    pub fn in_set_row(&self) -> &[Fe] {
        &self.in_set
    }

    /// `f̃'(r, y)`.
    pub fn claims_row(&self) -> &[Fe] {
        &self.claimed
    }

    /// `h̃(r, y)`.
    pub fn indicator_row(&self, field: &Field) -> Vec<Fe> {
        self.in_set
            .iter()
            .map(|&s| field.sub(field.one(), s))
            .collect()
    }

    pub fn size_bits(&self, field: &Field) -> u64 {
        2 * self.shape.d2 as u64 * field.bits_per_elem() as u64
    }
}

/// `h̃(r, ·)` for `h(j) = 1{j ∉ S}` over the padded grid.
pub fn indicator_row<I>(field: &Field, keys: I, weights: &[Fe], shape: ShapeParams) -> Vec<Fe>
where
    I: IntoIterator<Item = usize>,
{
    let mut rows = ClaimRows::new(field, shape);
    for j in keys {
        rows.push(field, weights, j, field.zero());
    }
    rows.indicator_row(field)
}

/// `f̃'(r, ·)` for `f'` supported on the claimed keys.
pub fn claims_row<I>(field: &Field, claims: I, weights: &[Fe], shape: ShapeParams) -> Vec<Fe>
where
    I: IntoIterator<Item = (usize, Fe)>,
{
    let mut rows = ClaimRows::new(field, shape);
    for (j, v) in claims {
        rows.push(field, weights, j, v);
    }
    rows.claimed
}

/// Column-major copy of the shaped frequency grid, for the prover's
/// repeated row evaluations.
#[derive(Clone, Debug)]
pub struct FrequencyGrid {
    shape: ShapeParams,
    /// `cols[(y-1)*d1 + (x-1)] = f(x, y)`
    cols: Vec<i64>,
}

impl FrequencyGrid {
    pub fn new(fv: &FrequencyVector, shape: ShapeParams) -> Self {
        let mut cols = vec![0i64; shape.cells()];
        for (j, f) in fv.nonzero() {
            let (x, y) = shape.shape_unchecked(j);
            cols[(y - 1) * shape.d1 + (x - 1)] = f;
        }
        Self { shape, cols }
    }

    pub fn shape(&self) -> ShapeParams {
        self.shape
    }

    /// `f̃(x*, y)` for every column, given `weights = [L_x(x*)]`.
    pub fn row_at(&self, field: &Field, weights: &[Fe]) -> Vec<Fe> {
        let raw: Vec<i128> = weights.iter().map(|&w| Field::raw(w) as i128).collect();
        self.cols
            .chunks_exact(self.shape.d1)
            .map(|col| {
                let acc: i128 = col
                    .iter()
                    .zip(&raw)
                    .filter(|(&f, _)| f != 0)
                    .map(|(&f, &w)| w * f as i128)
                    .sum();
                field.reduce_mont_i128(acc)
            })
            .collect()
    }
}

/// `f̃(x*, y)` for all grid columns `y`, from the full frequency vector.
pub fn offline_row_at(
    field: &Field,
    fv: &FrequencyVector,
    x_star: Fe,
    shape: ShapeParams,
) -> Result<Vec<Fe>, FieldError> {
    let weights = lagrange_row_weights(field, x_star, shape.d1)?;
    Ok(FrequencyGrid::new(fv, shape).row_at(field, &weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{eval_poly, interpolate};
    use crate::stream::{gen_stream, GenKind};
    use proptest::prelude::*;

    fn q101() -> Field {
        Field::new(101).unwrap()
    }

    /// Interpolates column `y` of `grid(x, y)` in `X` and evaluates at `r`.
    fn brute_row(
        field: &Field,
        shape: ShapeParams,
        grid: impl Fn(usize, usize) -> Fe,
        r: Fe,
    ) -> Vec<Fe> {
        (1..=shape.d2)
            .map(|y| {
                let pts: Vec<_> = (1..=shape.d1)
                    .map(|x| (field.elem(x as u64), grid(x, y)))
                    .collect();
                eval_poly(field, &interpolate(field, &pts).unwrap(), r)
            })
            .collect()
    }

    #[test]
    fn update_examples() {
        let f = q101();
        let shape = ShapeParams::new(8).unwrap();
        let r = f.elem(40);
        let row = LdeRow::new(&f, shape, r).unwrap();
        assert!(row.row().iter().all(|&e| e == f.zero()));
        let mut row = row;
        row.update(&f, &StreamToken::insert(7)); // (2, 3)
        let w = lagrange_row_weights(&f, r, 2).unwrap();
        assert_eq!(row.row(), &[f.zero(), f.zero(), w[1], f.zero()]);
    }

    #[test]
    fn indicator_and_claims_examples() {
        let f = q101();
        let shape = ShapeParams::new(27).unwrap();
        let w = lagrange_row_weights(&f, f.elem(55), shape.d1).unwrap();
        assert!(indicator_row(&f, [], &w, shape)
            .iter()
            .all(|&e| e == f.one()));
        assert!(claims_row(&f, [], &w, shape).iter().all(|&e| e == f.zero()));
        let (x0, y0) = shape.shape(14).unwrap();
        let h = indicator_row(&f, [14], &w, shape);
        let c = claims_row(&f, [(14, f.elem(9))], &w, shape);
        for y in 1..=shape.d2 {
            if y == y0 {
                assert_eq!(h[y - 1], f.sub(f.one(), w[x0 - 1]));
                assert_eq!(c[y - 1], f.mul(f.elem(9), w[x0 - 1]));
            } else {
                assert_eq!(h[y - 1], f.one());
                assert_eq!(c[y - 1], f.zero());
            }
        }
    }

    #[test]
    fn offline_row_at_grid_point_is_actual_row() {
        let f = find_field();
        let n = 100;
        let shape = ShapeParams::new(n).unwrap();
        let s = gen_stream(GenKind::TurnstileBalanced, n, 400, 5);
        let fv = FrequencyVector::from_stream(n, &s).unwrap();
        for x0 in 1..=shape.d1 {
            let row = offline_row_at(&f, &fv, f.elem(x0 as u64), shape).unwrap();
            for y in 1..=shape.d2 {
                let j = shape.unshape(x0, y);
                let expect = if j <= n { fv.get(j) } else { 0 };
                assert_eq!(row[y - 1], f.from_i64(expect));
            }
        }
        let zero = FrequencyVector::zeros(n);
        let row = offline_row_at(&f, &zero, f.elem(12345), shape).unwrap();
        assert!(row.iter().all(|&e| e == f.zero()));
    }

    fn find_field() -> Field {
        crate::ff::find_prime(1 << 40).unwrap()
    }

    proptest! {
        #[test]
        fn streamed_row_matches_offline_and_brute_force(n in 1usize..200, m in 0usize..300, seed in any::<u64>(), r in any::<u64>()) {
            let f = find_field();
            let shape = ShapeParams::new(n).unwrap();
            let r = f.elem(r);
            let s = gen_stream(GenKind::TurnstileBalanced, n, m, seed);
            let fv = FrequencyVector::from_stream(n, &s).unwrap();
            let mut row = LdeRow::new(&f, shape, r).unwrap();
            s.iter().for_each(|t| row.update(&f, t));
            prop_assert_eq!(row.row(), &offline_row_at(&f, &fv, r, shape).unwrap()[..]);
            let grid = |x, y| {
                let j = shape.unshape(x, y);
                f.from_i64(if j <= n { fv.get(j) } else { 0 })
            };
            prop_assert_eq!(row.row(), &brute_row(&f, shape, grid, r)[..]);
        }

        #[test]
        fn order_independent(n in 1usize..100, m in 0usize..200, seed in any::<u64>(), r in any::<u64>()) {
            let f = find_field();
            let shape = ShapeParams::new(n).unwrap();
            let r = f.elem(r);
            let s = gen_stream(GenKind::TurnstileBalanced, n, m, seed);
            let mut sorted = s.clone();
            sorted.sort();
            let mut a = LdeRow::new(&f, shape, r).unwrap();
            let mut b = LdeRow::new(&f, shape, r).unwrap();
            s.iter().for_each(|t| a.update(&f, t));
            sorted.iter().rev().for_each(|t| b.update(&f, t));
            prop_assert_eq!(a.row(), b.row());
        }

        #[test]
        fn claim_rows_match_interpolation(n in 1usize..64, keys in proptest::collection::btree_map(1usize..64, -20i64..20, 0..20), r in 0u64..101) {
            let f = q101();
            let shape = ShapeParams::new(n).unwrap();
            let keys: Vec<(usize, i64)> = keys.into_iter().filter(|(j, _)| *j <= shape.cells()).collect();
            let r = f.elem(r);
            let w = lagrange_row_weights(&f, r, shape.d1).unwrap();
            let h = indicator_row(&f, keys.iter().map(|(j, _)| *j), &w, shape);
            let c = claims_row(&f, keys.iter().map(|&(j, v)| (j, f.from_i64(v))), &w, shape);
            let lookup = |x, y| keys.iter().find(|(j, _)| *j == shape.unshape(x, y)).map(|&(_, v)| v);
            let brute_h = brute_row(&f, shape, |x, y| if lookup(x, y).is_some() { f.zero() } else { f.one() }, r);
            let brute_c = brute_row(&f, shape, |x, y| f.from_i64(lookup(x, y).unwrap_or(0)), r);
            prop_assert_eq!(h, brute_h);
            prop_assert_eq!(c, brute_c);
        }
    }
}
