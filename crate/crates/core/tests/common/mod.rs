//! Textbook-formula oracles, written without the crate's fast paths.
#![allow(dead_code)]

use avs_core::ff::{Fe, Field};
use avs_core::gfun::GSpec;
use avs_core::stream::{FrequencyVector, ShapeParams};

/// `Π_{k≠x} (r − k) / (x − k)` over the grid `{1..d}`.
pub fn basis(field: &Field, x: usize, d: usize, r: Fe) -> Fe {
    let mut num = field.one();
    let mut den = field.one();
    for k in 1..=d {
        if k != x {
            num = field.mul(num, field.sub(r, field.elem(k as u64)));
            den = field.mul(den, field.from_i64(x as i64 - k as i64));
        }
    }
    field.mul(num, field.inv(den).unwrap())
}

fn cell(shape: ShapeParams, x: usize, y: usize) -> usize {
    (x - 1) * shape.d2 + y
}

/// `Σ_x v(j(x, y)) · L_x(r)` for each column `y`.
pub fn lde_row(field: &Field, shape: ShapeParams, r: Fe, v: impl Fn(usize) -> Fe) -> Vec<Fe> {
    (1..=shape.d2)
        .map(|y| {
            (1..=shape.d1).fold(field.zero(), |acc, x| {
                field.add(
                    acc,
                    field.mul(v(cell(shape, x, y)), basis(field, x, shape.d1, r)),
                )
            })
        })
        .collect()
}

pub fn freq_row(field: &Field, fv: &FrequencyVector, shape: ShapeParams, r: Fe) -> Vec<Fe> {
    lde_row(field, shape, r, |j| {
        if j <= fv.n {
            field.from_i64(fv.get(j))
        } else {
            field.zero()
        }
    })
}

/// `g̃(z) = Σ_a g(a) · Π_{b≠a} (z − b) / (a − b)` over `a, b ∈ [−B, B]`.
pub fn g_tilde(field: &Field, g: &GSpec, band: i64, z: Fe) -> Fe {
    let mut acc = field.zero();
    for a in -band..=band {
        let mut term = field.elem(g.eval(a));
        for b in -band..=band {
            if b != a {
                let num = field.sub(z, field.from_i64(b));
                let den = field.inv(field.from_i64(a - b)).unwrap();
                term = field.mul(term, field.mul(num, den));
            }
        }
        acc = field.add(acc, term);
    }
    acc
}

/// `P(r)` straight from its definition, `S = keys`.
pub fn p_at(
    field: &Field,
    fv: &FrequencyVector,
    shape: ShapeParams,
    keys: &[u32],
    g: &GSpec,
    band: i64,
    r: Fe,
) -> Fe {
    let f = freq_row(field, fv, shape, r);
    let h = lde_row(field, shape, r, |j| {
        if keys.contains(&(j as u32)) {
            field.zero()
        } else {
            field.one()
        }
    });
    f.iter().zip(&h).fold(field.zero(), |acc, (&fy, &hy)| {
        field.add(acc, field.mul(g_tilde(field, g, band, fy), hy))
    })
}

/// `Q(r)` straight from its definition.
pub fn q_at(
    field: &Field,
    fv: &FrequencyVector,
    shape: ShapeParams,
    claims: &[(u32, Fe)],
    r: Fe,
) -> Fe {
    let f = freq_row(field, fv, shape, r);
    let lookup = |j: usize| claims.iter().find(|c| c.0 as usize == j).map(|c| c.1);
    let fc = lde_row(field, shape, r, |j| lookup(j).unwrap_or(field.zero()));
    let s = lde_row(field, shape, r, |j| {
        if lookup(j).is_some() {
            field.one()
        } else {
            field.zero()
        }
    });
    (0..shape.d2).fold(field.zero(), |acc, y| {
        let d = field.sub(f[y], fc[y]);
        field.add(acc, field.mul(field.mul(d, d), s[y]))
    })
}
