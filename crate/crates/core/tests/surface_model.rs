mod common;

use common::shoelace2;
use halftrans::{builtin, parse_surface, EdgeRef, Gluing, Mat2, Polygon, Scalar, Sign, Surface, Vec2};

fn area_oracle(s: &Surface) -> Scalar {
    let twice = s.polygons().iter().fold(Scalar::zero(), |acc, p| &acc + &shoelace2(&p.vertices));
    &twice / &Scalar::int(2)
}

#[test]
fn builtins_have_expected_invariants() {
    for (name, genus, stratum, area) in [
        ("square_torus", 1, vec![0], Scalar::one()),
        ("regular_octagon", 2, vec![4], Scalar::quad(8, 8, 2)),
        ("L_shape_2x1", 2, vec![4], Scalar::int(3)),
    ] {
        let s = builtin(name).unwrap();
        let i = s.info();
        assert_eq!(i.genus, genus, "{name}");
        assert_eq!(i.stratum, stratum, "{name}");
        assert_eq!(i.total_area, area, "{name}");
        assert_eq!(area_oracle(&s), area, "{name}");
        assert!(i.is_translation, "{name}");
    }
}

#[test]
fn json_round_trip() {
    for name in ["square_torus", "regular_octagon", "L_shape_2x1"] {
        let s = builtin(name).unwrap();
        let back = parse_surface(s.to_json().as_bytes()).unwrap();
        assert_eq!(back.to_json(), s.to_json());
        assert_eq!(back.info(), s.info());
    }
}

#[test]
fn matrix_action_scales_area() {
    let s = builtin("regular_octagon").unwrap();
    let a = Mat2::new(Scalar::one(), Scalar::sqrt_of(2), Scalar::zero(), Scalar::one());
    let t = s.apply_matrix(&a).unwrap();
    assert_eq!(t.total_area(), s.total_area());
    let b = Mat2::ints(2, 0, 0, 3);
    let u = s.apply_matrix(&b).unwrap();
    assert_eq!(u.total_area(), &s.total_area() * &Scalar::int(6));
    assert_eq!(area_oracle(&u), u.total_area());
    assert!(s.apply_matrix(&Mat2::ints(1, 1, 1, 1)).is_err());
}

#[test]
fn pillowcase_is_half_translation() {
    // Two unit squares side by side: the vertical sides close up into a
    // cylinder and the bottom (top) sides fold onto each other by rotation.
    // The result is a sphere with four cone points of angle pi.
    let sq = |x0| vec![Vec2::ints(x0, 0), Vec2::ints(x0 + 1, 0), Vec2::ints(x0 + 1, 1), Vec2::ints(x0, 1)];
    let g = |a: usize, b: usize, sign| Gluing { from: EdgeRef::new(0, a), to: EdgeRef::new(1, b), sign };
    let s = Surface::from_parts(
        1,
        vec![Polygon { name: "a".into(), vertices: sq(0) }, Polygon { name: "b".into(), vertices: sq(1) }],
        vec![g(0, 0, Sign::Minus), g(2, 2, Sign::Minus), g(1, 3, Sign::Plus), g(3, 1, Sign::Plus)],
    )
    .unwrap();
    let i = s.info();
    assert!(!i.is_translation);
    assert_eq!(i.genus, 0);
    assert_eq!(i.stratum, vec![-1, -1, -1, -1]);
    assert_eq!(area_oracle(&s), Scalar::int(2));
}

#[test]
fn disguised_torus_is_translation() {
    // Same two squares with every side glued to the same side by rotation;
    // turning the second square over makes every gluing a translation.
    let sq = |x0| vec![Vec2::ints(x0, 0), Vec2::ints(x0 + 1, 0), Vec2::ints(x0 + 1, 1), Vec2::ints(x0, 1)];
    let g = |k: usize| Gluing { from: EdgeRef::new(0, k), to: EdgeRef::new(1, k), sign: Sign::Minus };
    let s = Surface::from_parts(
        1,
        vec![Polygon { name: "a".into(), vertices: sq(0) }, Polygon { name: "b".into(), vertices: sq(2) }],
        (0..4).map(g).collect(),
    )
    .unwrap();
    let i = s.info();
    assert!(i.is_translation);
    assert_eq!(i.genus, 1);
}

#[test]
fn invalid_surfaces_are_rejected() {
    let tri = vec![Vec2::ints(0, 0), Vec2::ints(2, 0), Vec2::ints(0, 1)];
    let bad = Surface::from_parts(
        1,
        vec![Polygon { name: "t".into(), vertices: tri }],
        vec![Gluing { from: EdgeRef::new(0, 0), to: EdgeRef::new(0, 2), sign: Sign::Plus }],
    );
    assert!(bad.is_err());
    let reflex = vec![Vec2::ints(0, 0), Vec2::ints(2, 0), Vec2::ints(1, 1), Vec2::ints(2, 2), Vec2::ints(0, 2)];
    let bad = Surface::from_parts(1, vec![Polygon { name: "r".into(), vertices: reflex }], vec![]);
    assert!(bad.is_err());
    assert!(builtin("sphere").is_err());
    assert!(parse_surface(b"{}").is_err());
}

#[test]
fn flipping_one_octagon_gluing_is_rejected() {
    // Opposite sides of the octagon have opposite vectors, so a rotation
    // gluing between them cannot match.
    let s = builtin("regular_octagon").unwrap();
    let mut gluings = s.gluings().to_vec();
    gluings[0].sign = Sign::Minus;
    let err = Surface::from_parts(2, s.polygons().to_vec(), gluings).unwrap_err();
    assert!(matches!(err, halftrans::Error::GluingMismatch(_)));
}
