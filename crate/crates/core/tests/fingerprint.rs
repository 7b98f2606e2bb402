mod common;

use avs_core::ff::Field;
use avs_core::lde::LdeRow;
use avs_core::stream::{gen_stream, FrequencyVector, GenKind, ShapeParams};

/// Two different frequency arrays on a 3 × 3 grid agree on `f̃(r, ·)` only
/// when `r` is a root of every column difference, at most `d1 − 1 = 2` values.
#[test]
fn distinct_grids_collide_on_at_most_two_points() {
    let field = Field::new(101).unwrap();
    let shape = ShapeParams::new(9).unwrap();
    assert_eq!((shape.d1, shape.d2), (3, 3));
    let row = |fv: &FrequencyVector, r| {
        let mut l = LdeRow::new(&field, shape, field.elem(r)).unwrap();
        for (j, f) in fv.nonzero() {
            for _ in 0..f.unsigned_abs() {
                let t = if f > 0 {
                    avs_core::stream::StreamToken::insert(j as u32)
                } else {
                    avs_core::stream::StreamToken::delete(j as u32)
                };
                l.update(&field, &t);
            }
        }
        l.row().to_vec()
    };
    for seed in 0..40u64 {
        let a =
            FrequencyVector::from_stream(9, &gen_stream(GenKind::TurnstileBalanced, 9, 12, seed))
                .unwrap();
        let b = FrequencyVector::from_stream(
            9,
            &gen_stream(GenKind::TurnstileBalanced, 9, 12, seed + 1000),
        )
        .unwrap();
        if a == b {
            continue;
        }
        let collisions = (0..101).filter(|&r| row(&a, r) == row(&b, r)).count();
        assert!(collisions <= 2, "seed {seed}: {collisions}");
        // textbook basis agrees with the streamed row
        for r in [0u64, 5, 77] {
            assert_eq!(
                row(&a, r),
                common::freq_row(&field, &a, shape, field.elem(r))
            );
        }
    }
}
