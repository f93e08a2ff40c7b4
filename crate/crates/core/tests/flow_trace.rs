mod common;

use common::primitive_vectors;
use halftrans::flow::{direction_decomposition, first_hit, Decomposition};
use halftrans::trace::{trace_ray, SurfacePoint, Terminal};
use halftrans::{builtin, EdgeRef, Gluing, Polygon, Scalar, Sign, Surface, Vec2};
use proptest::prelude::*;

fn torus() -> Surface {
    builtin("square_torus").unwrap()
}

/// Fractional part of `n / d` for `d > 0`, as `(num, d)`.
fn frac(n: i64, d: i64) -> (i64, i64) {
    (n.rem_euclid(d), d)
}

proptest! {
    // On the unit torus the segment from 0 to (1,0) flowed by w = (a, b)
    // first meets the lattice at time 1/b, from foot frac(-a/b).
    #[test]
    fn torus_first_hit_matches_lattice(a in -6i64..6, b in 1i64..7) {
        let s = torus();
        let w = Vec2::ints(a, b);
        let hit = first_hit(&s, 0, &Vec2::ints(1, 0), &w, false, None).unwrap();
        let (fnum, fden) = frac(-a, b);
        prop_assert_eq!(&hit.param, &Scalar::frac(1, b));
        prop_assert_eq!(&hit.foot, &Scalar::frac(fnum, fden));
        prop_assert_eq!(&hit.distance2, &Scalar::frac(a * a + b * b, b * b));
        if fnum != 0 {
            let open = first_hit(&s, 0, &Vec2::ints(1, 0), &w, true, None).unwrap();
            prop_assert_eq!(open.param, hit.param);
        }
    }

    #[test]
    fn torus_decomposition_is_one_cylinder(idx in 0usize..20) {
        let dirs: Vec<_> = primitive_vectors(50).into_iter().collect();
        let (p, q) = dirs[idx % dirs.len()];
        let n2 = p * p + q * q;
        let dec = direction_decomposition(&torus(), &Vec2::ints(p, q), None).unwrap();
        let Decomposition::Periodic { cylinders, saddle_connections, .. } = &dec else {
            panic!("torus direction ({p},{q}) not periodic");
        };
        prop_assert_eq!(cylinders.len(), 1);
        prop_assert_eq!(saddle_connections.len(), 1);
        let c = &cylinders[0];
        prop_assert_eq!(&c.circumference2, &Scalar::int(n2));
        prop_assert_eq!(&c.height2, &Scalar::frac(1, n2));
        prop_assert!(c.is_simple());
        // Circumference times height is the area.
        prop_assert_eq!(&c.circumference2 * &c.height2, Scalar::one());
    }
}

#[test]
fn closed_tie_goes_to_smaller_foot() {
    let hit = first_hit(&torus(), 0, &Vec2::ints(1, 0), &Vec2::ints(0, 1), false, None).unwrap();
    assert_eq!((hit.param.clone(), hit.foot.clone(), hit.class), (Scalar::one(), Scalar::zero(), 0));
    assert_eq!(hit.distance(), Some(Scalar::one()));
}

#[test]
fn l_shape_cylinders() {
    let s = builtin("L_shape_2x1").unwrap();
    for dir in [Vec2::ints(1, 0), Vec2::ints(0, 1)] {
        let dec = direction_decomposition(&s, &dir, None).unwrap();
        let cyl = dec.cylinders().expect("periodic");
        let mut shapes: Vec<(Scalar, Scalar)> =
            cyl.iter().map(|c| (c.circumference2.clone(), c.height2.clone())).collect();
        shapes.sort();
        assert_eq!(shapes, vec![(Scalar::int(1), Scalar::int(1)), (Scalar::int(4), Scalar::int(1))]);
        let area = cyl.iter().fold(Scalar::zero(), |acc, c| {
            &acc + &(c.circumference.as_ref().unwrap() * c.height.as_ref().unwrap())
        });
        assert_eq!(area, s.total_area());
    }
}

#[test]
fn irrational_direction_is_unknown() {
    let sq = vec![Vec2::ints(0, 0), Vec2::ints(1, 0), Vec2::ints(1, 1), Vec2::ints(0, 1)];
    let g = |a, b| Gluing { from: EdgeRef::new(0, a), to: EdgeRef::new(0, b), sign: Sign::Plus };
    let s = Surface::from_parts(2, vec![Polygon { name: "sq".into(), vertices: sq }], vec![g(0, 2), g(1, 3)]).unwrap();
    let dir = Vec2::new(Scalar::one(), Scalar::sqrt_of(2));
    assert_eq!(direction_decomposition(&s, &dir, Some(200)).unwrap(), Decomposition::Unknown);
}

#[test]
fn interior_rays() {
    let s = torus();
    let start = SurfacePoint::Interior { poly: 0, point: Vec2::new(Scalar::frac(1, 2), Scalar::frac(1, 3)) };
    let t = trace_ray(&s, &start, &Vec2::ints(1, 0), &Scalar::int(4)).unwrap();
    assert_eq!(t.crossings.len(), 2);
    assert_eq!(t.terminal, Terminal::BudgetExceeded);

    let start = SurfacePoint::Interior { poly: 0, point: Vec2::new(Scalar::frac(1, 2), Scalar::frac(1, 2)) };
    let t = trace_ray(&s, &start, &Vec2::ints(1, 1), &Scalar::int(4)).unwrap();
    assert!(matches!(t.terminal, Terminal::HitMarked { class: 0, .. }));
    assert_eq!(t.len2, Scalar::frac(1, 2));

    let outside = SurfacePoint::Interior { poly: 0, point: Vec2::ints(2, 2) };
    assert!(trace_ray(&s, &outside, &Vec2::ints(1, 0), &Scalar::one()).is_err());
    assert!(trace_ray(&s, &start, &Vec2::zero(), &Scalar::one()).is_err());
}
