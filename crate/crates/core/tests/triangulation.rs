mod common;

use std::collections::BTreeSet;

use common::{by_holonomy, shoelace2};
use halftrans::saddle::Catalog;
use halftrans::triangulation::{complete_triangulation, edge_count, flip, flip_bfs, FlipOutcome, Triangulation};
use halftrans::{builtin, Error, Scalar, Surface};
use proptest::prelude::*;

fn faces_tile(s: &Surface, t: &Triangulation) -> bool {
    let faces = t.faces.iter().fold(Scalar::zero(), |acc, f| &acc + &shoelace2(&f.points));
    faces == &s.total_area() * &Scalar::int(2) && t.faces.iter().all(|f| shoelace2(&f.points).is_positive())
}

fn each_edge_twice(t: &Triangulation) -> bool {
    let mut count = vec![0; t.edges.len()];
    for f in &t.faces {
        for id in t.face_ids(f) {
            count[t.edge_index(id).unwrap()] += 1;
        }
    }
    count.iter().all(|&c| c == 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn flips_keep_a_triangulation(steps in proptest::collection::vec(0usize..9, 0..5), octagon in any::<bool>()) {
        let s = builtin(if octagon { "regular_octagon" } else { "square_torus" }).unwrap();
        let mut t = complete_triangulation(&Catalog::new(&s), &[]).unwrap();
        for k in steps {
            let id = t.edges[k % t.edges.len()].id.clone();
            if let FlipOutcome::Flipped { triangulation, new_edge } = flip(&s, &t, &id).unwrap() {
                prop_assert!(triangulation.edge_index(&new_edge).is_some());
                prop_assert!(triangulation.edge_index(&id).is_none());
                t = triangulation;
            }
            prop_assert_eq!(t.edges.len(), edge_count(&s));
            prop_assert!(faces_tile(&s, &t));
            prop_assert!(each_edge_twice(&t));
        }
    }
}

#[test]
fn greedy_completion_sizes() {
    for (name, e) in [("square_torus", 3), ("regular_octagon", 9), ("L_shape_2x1", 9)] {
        let s = builtin(name).unwrap();
        let t = complete_triangulation(&Catalog::new(&s), &[]).unwrap();
        assert_eq!(edge_count(&s), e, "{name}");
        assert_eq!(t.edges.len(), e, "{name}");
        assert!(faces_tile(&s, &t), "{name}");
    }
}

#[test]
fn seeds_are_kept_and_checked() {
    let s = builtin("square_torus").unwrap();
    let cat = Catalog::new(&s);
    let seed = vec![by_holonomy(&cat, 5, 1, 2)];
    let t = complete_triangulation(&cat, &seed).unwrap();
    assert!(t.edge_index(&seed[0].id).is_some());
    let crossing = vec![by_holonomy(&cat, 2, 1, 1), by_holonomy(&cat, 2, -1, 1)];
    assert_eq!(complete_triangulation(&cat, &crossing).unwrap_err(), Error::SeedNotDisjoint);
}

#[test]
fn torus_flip_graph_depth_one() {
    let s = builtin("square_torus").unwrap();
    let t = complete_triangulation(&Catalog::new(&s), &[]).unwrap();
    let (g, tris) = flip_bfs(&s, &t, 1).unwrap();
    // All three edges of a torus triangulation are flippable.
    assert_eq!(g.nodes.len(), 4);
    assert_eq!(tris.len(), 4);
    assert!(g.not_flippable.is_empty());
    let distinct: BTreeSet<_> = g.nodes.iter().collect();
    assert_eq!(distinct.len(), 4);
    assert!(flip(&s, &t, "nope").is_err());
}
