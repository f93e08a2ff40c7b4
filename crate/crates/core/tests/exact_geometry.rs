mod common;

use halftrans::{mat_inverse, orient, Mat2, Scalar, Vec2};
use proptest::prelude::*;

fn q2() -> impl Strategy<Value = Scalar> {
    (-20i64..20, -20i64..20, 1i64..6).prop_map(|(a, b, q)| &Scalar::quad(a, b, 2) / &Scalar::int(q))
}

fn v2() -> impl Strategy<Value = Vec2> {
    (q2(), q2()).prop_map(|(x, y)| Vec2::new(x, y))
}

proptest! {
    #[test]
    fn field_axioms(a in q2(), b in q2(), c in q2()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip(), Scalar::one());
        }
    }

    #[test]
    fn order_agrees_with_floats_when_far_apart(a in q2(), b in q2()) {
        let (x, y) = (a.to_f64(), b.to_f64());
        if (x - y).abs() > 1e-6 {
            prop_assert_eq!(a < b, x < y);
        }
        prop_assert_eq!(a.signum(), if a.is_zero() { 0 } else if x > 0.0 { 1 } else { -1 });
    }

    #[test]
    fn norm_is_product_with_conjugate(a in q2()) {
        let n = &a * &a.conjugate();
        prop_assert!(n.is_rational());
        prop_assert_eq!(n.rational_part(), &a.norm());
    }

    #[test]
    fn key_round_trips(a in q2()) {
        prop_assert_eq!(Scalar::parse(&a.key(), 2).unwrap(), a);
    }

    #[test]
    fn orient_is_antisymmetric(p in v2(), q in v2(), r in v2()) {
        let o = orient(&p, &q, &r);
        prop_assert_eq!(orient(&q, &p, &r), -o);
        prop_assert_eq!(orient(&q, &r, &p), o);
        // Direct determinant.
        let d = &(&(&q.x - &p.x) * &(&r.y - &p.y)) - &(&(&q.y - &p.y) * &(&r.x - &p.x));
        prop_assert_eq!(o, d.signum());
    }

    #[test]
    fn inverse_is_two_sided(a in q2(), b in q2(), c in q2(), d in q2(), v in v2()) {
        let m = Mat2::new(a, b, c, d);
        match mat_inverse(&m) {
            Ok(inv) => {
                prop_assert_eq!(m.mul(&inv), Mat2::identity());
                prop_assert_eq!(inv.mul(&m), Mat2::identity());
                prop_assert_eq!(inv.apply(&m.apply(&v)), v);
            }
            Err(_) => prop_assert!(m.det().is_zero()),
        }
    }
}

#[test]
fn sqrt2_is_irrational_and_positive() {
    let r2 = Scalar::sqrt_of(2);
    assert_eq!(&r2 * &r2, Scalar::int(2));
    assert!(r2 > Scalar::frac(141, 100) && r2 < Scalar::frac(142, 100));
    assert!(Scalar::quad(-3, 2, 2).is_negative());
    assert!(Scalar::quad(-2, 2, 2).is_positive());
}

#[test]
fn singular_matrix_is_rejected() {
    assert!(mat_inverse(&Mat2::ints(1, 2, 2, 4)).is_err());
}

#[test]
fn parse_rejects_garbage() {
    assert!(Scalar::parse("1/0", 2).is_err());
    assert!(Scalar::parse("abc", 2).is_err());
}
