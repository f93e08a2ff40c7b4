mod common;

use std::collections::BTreeSet;

use common::{ints, primitive_vectors};
use halftrans::saddle::{from_id, Catalog};
use halftrans::{builtin, Scalar};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn torus_catalog_matches_primitive_vectors(l2 in 1i64..80) {
        let s = builtin("square_torus").unwrap();
        let scs = Catalog::new(&s).enumerate(&Scalar::int(l2));
        let got: BTreeSet<_> = scs.iter().map(|sc| ints(&sc.holonomy)).collect();
        prop_assert_eq!(got.len(), scs.len());
        prop_assert_eq!(got, primitive_vectors(l2));
        for sc in &scs {
            prop_assert_eq!(&sc.len2, &sc.holonomy.norm2());
            prop_assert_eq!(&sc.direction.norm2(), &sc.len2);
        }
    }
}

#[test]
fn catalog_is_sorted_unique_and_monotone() {
    for name in ["regular_octagon", "L_shape_2x1"] {
        let s = builtin(name).unwrap();
        let cat = Catalog::new(&s);
        let small = cat.enumerate(&Scalar::int(12));
        let big = cat.enumerate(&Scalar::int(30));
        let ids: BTreeSet<_> = big.iter().map(|sc| sc.id.clone()).collect();
        assert_eq!(ids.len(), big.len(), "{name}: duplicate ids");
        assert!(small.iter().all(|sc| ids.contains(&sc.id)), "{name}: truncation not monotone");
        assert!(big.windows(2).all(|w| w[0].canonical_cmp(&w[1]).is_lt()), "{name}: not sorted");
        for sc in &big {
            assert!(sc.len2 <= Scalar::int(30));
            assert!(sc.holonomy.in_field(s.field_d()));
            assert_eq!(sc.len2, sc.holonomy.norm2());
        }
    }
}

#[test]
fn octagon_short_connections_are_edges_and_diagonals() {
    // Side length 2: the four side directions are the shortest connections,
    // and the octagon's shortest diagonal has squared length 8 + 4 sqrt 2.
    let s = builtin("regular_octagon").unwrap();
    let scs = Catalog::new(&s).enumerate(&Scalar::int(4));
    assert_eq!(scs.len(), 4);
    assert!(scs.iter().all(|sc| sc.boundary_edge.is_some() && sc.len2 == Scalar::int(4)));
    let diag = Scalar::quad(8, 4, 2);
    let more = Catalog::new(&s).enumerate(&diag);
    assert!(more.iter().any(|sc| sc.len2 == diag));
}

#[test]
fn ids_round_trip() {
    for name in ["square_torus", "regular_octagon", "L_shape_2x1"] {
        let s = builtin(name).unwrap();
        for sc in Catalog::new(&s).enumerate(&Scalar::int(20)) {
            let back = from_id(&s, &sc.id).unwrap();
            assert_eq!(back, sc);
        }
        assert!(from_id(&s, "v0:h1/1+0/1r,0/1+0/1r:wbogus").is_err());
    }
}
