mod common;

use common::{shoelace2, turn};
use halftrans::admissible::{coconvexify, is_admissible, pentagon_of_triangle, AdmissiblePolygon, Violation};
use halftrans::graph::TriangleWitness;
use halftrans::saddle::Catalog;
use halftrans::triangulation::{complete_triangulation, flip_bfs};
use halftrans::{builtin, HalfTranslation, Scalar, Surface, Vec2};

fn torus() -> Surface {
    builtin("square_torus").unwrap()
}

fn pts(v: &[(i64, i64)]) -> Vec<Vec2> {
    v.iter().map(|&(x, y)| Vec2::ints(x, y)).collect()
}

fn check(s: &Surface, v: &[(i64, i64)]) -> halftrans::admissible::Report {
    is_admissible(s, &pts(v), 0, &HalfTranslation::identity()).unwrap()
}

#[test]
fn unit_triangles_are_admissible() {
    let s = torus();
    assert!(check(&s, &[(0, 0), (1, 0), (0, 1)]).admissible);
    assert!(check(&s, &[(0, 0), (2, 1), (1, 1)]).admissible);
}

#[test]
fn violations_are_reported() {
    let s = torus();
    let r = check(&s, &[(0, 0), (2, 0), (2, 2), (0, 2)]);
    assert!(!r.admissible);
    assert!(r.violations.iter().any(|v| matches!(v, Violation::MarkedInterior { .. })));
    assert!(r.violations.iter().any(|v| matches!(v, Violation::MarkedOnSide { .. })));

    let r = check(&s, &[(0, 0), (2, 0), (0, 1)]);
    assert!(r.violations.iter().any(|v| matches!(v, Violation::MarkedOnSide { side: 0, .. })));

    let half = vec![Vec2::ints(0, 0), Vec2::new(Scalar::frac(1, 2), Scalar::zero()), Vec2::ints(0, 1)];
    let r = is_admissible(&s, &half, 0, &HalfTranslation::identity()).unwrap();
    assert!(r.violations.contains(&Violation::VertexNotMarked { vertex: 1 }));

    // Area 3/2 exceeds the torus area, so the polygon cannot embed.
    let r = check(&s, &[(0, 0), (2, 1), (1, 2)]);
    assert!(!r.admissible);
}

#[test]
fn faces_give_admissible_triangles() {
    for name in ["square_torus", "regular_octagon", "L_shape_2x1"] {
        let s = builtin(name).unwrap();
        let t = complete_triangulation(&Catalog::new(&s), &[]).unwrap();
        let mut area = Scalar::zero();
        for f in &t.faces {
            let p = AdmissiblePolygon::from_face(&s, f).unwrap();
            let r = is_admissible(&s, &p.vertices, p.anchor_poly, &p.anchor).unwrap();
            assert!(r.admissible, "{name}: {:?}", r.violations);
            assert_eq!(p.side_ids.len(), 3);
            area = &area + &p.area();
        }
        assert_eq!(area, s.total_area(), "{name}");
    }
}

#[test]
fn pentagons_contain_their_triangle() {
    for name in ["square_torus", "L_shape_2x1"] {
        let s = builtin(name).unwrap();
        let t = complete_triangulation(&Catalog::new(&s), &[]).unwrap();
        for f in &t.faces {
            let tw = TriangleWitness { sides: t.face_ids(f).map(str::to_string), face: f.clone() };
            let out = pentagon_of_triangle(&s, &tw).unwrap();
            let p = out.polygon();
            let r = is_admissible(&s, &p.vertices, p.anchor_poly, &p.anchor).unwrap();
            assert!(r.admissible, "{name}: {:?}", r.violations);
            assert!(shoelace2(&p.vertices) >= shoelace2(&f.points), "{name}");
        }
    }
}

#[test]
fn coconvexify_l_shape() {
    let s = builtin("L_shape_2x1").unwrap();
    let t = complete_triangulation(&Catalog::new(&s), &[]).unwrap();
    let (_, near) = flip_bfs(&s, &t, 1).unwrap();
    let mut done = 0;
    for tr in &near {
        for fa in &tr.faces {
            for ka in 0..3 {
                let (fj, kb) = tr.face_of(fa.darts[ka].twin());
                let Ok(q) = AdmissiblePolygon::from_faces(&s, fa, ka, &tr.faces[fj], kb) else { continue };
                let v = &q.vertices;
                let turns: Vec<i32> = (0..4).map(|k| turn(&v[(k + 3) % 4], &v[k], &v[(k + 1) % 4])).collect();
                let Some(r) = (0..4).find(|&r| turns[r] <= 0 && (0..4).all(|k| k == r || turns[k] > 0)) else {
                    continue;
                };
                let out = coconvexify(&s, &q, r).unwrap();
                let w = &out.result.vertices;
                assert!((0..4).all(|k| turn(&w[(k + 3) % 4], &w[k], &w[(k + 1) % 4]) > 0));
                let rr = is_admissible(&s, w, out.result.anchor_poly, &out.result.anchor).unwrap();
                assert!(rr.admissible);
                assert!(out.steps.len() <= out.cap(&s));
                done += 1;
            }
        }
    }
    assert!(done > 0);
}

#[test]
fn coconvexify_preconditions() {
    let s = torus();
    let t = complete_triangulation(&Catalog::new(&s), &[]).unwrap();
    let p = AdmissiblePolygon::from_face(&s, &t.faces[0]).unwrap();
    assert!(coconvexify(&s, &p, 0).is_err());
}
