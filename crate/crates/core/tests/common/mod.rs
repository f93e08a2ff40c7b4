//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's geometry; inputs are plain integers or exact scalars.
#![allow(dead_code)]

use std::collections::BTreeSet;

use halftrans::saddle::{Catalog, SaddleConnection};
use halftrans::{Scalar, Vec2};
use num_traits::ToPrimitive;

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `(p, q)` up to sign with `q > 0`, or `q = 0, p > 0`.
pub fn canon(p: i64, q: i64) -> (i64, i64) {
    if q < 0 || (q == 0 && p < 0) {
        (-p, -q)
    } else {
        (p, q)
    }
}

/// Primitive integer vectors up to sign with `p² + q² <= l2`, by brute force.
pub fn primitive_vectors(l2: i64) -> BTreeSet<(i64, i64)> {
    let r = (l2 as f64).sqrt() as i64 + 1;
    let mut out = BTreeSet::new();
    for p in -r..=r {
        for q in -r..=r {
            if (p, q) != (0, 0) && p * p + q * q <= l2 && gcd(p, q) == 1 {
                out.insert(canon(p, q));
            }
        }
    }
    out
}

pub fn int(x: &Scalar) -> i64 {
    x.to_integer().expect("integer scalar").to_i64().expect("small integer")
}

pub fn ints(v: &Vec2) -> (i64, i64) {
    (int(&v.x), int(&v.y))
}

/// Twice the signed area of a polygon, by the shoelace formula.
pub fn shoelace2(pts: &[Vec2]) -> Scalar {
    let mut acc = Scalar::zero();
    for i in 0..pts.len() {
        let (a, b) = (&pts[i], &pts[(i + 1) % pts.len()]);
        acc = &acc + &(&(&a.x * &b.y) - &(&a.y * &b.x));
    }
    acc
}

/// Sign of the turn `a -> b -> c`, computed directly.
pub fn turn(a: &Vec2, b: &Vec2, c: &Vec2) -> i32 {
    let u = b - a;
    let w = c - b;
    (&(&u.x * &w.y) - &(&u.y * &w.x)).signum()
}

/// Steps of the Euclidean algorithm taking a primitive vector to `(1, 0)` by
/// `S = [[0,-1],[1,0]]` and powers of `T = [[1,1],[0,1]]`, up to sign.
pub fn euclid_reduce(mut p: i64, mut q: i64) -> Option<usize> {
    let mut steps = 0;
    loop {
        let c = canon(p, q);
        if c == (1, 0) {
            return Some(steps);
        }
        if q == 0 {
            return None;
        }
        if p == 0 {
            // S sends (0, q) to (-q, 0).
            (p, q) = (-q, p);
        } else if p.abs() >= q.abs() {
            // T^-k reduces p modulo q.
            p -= (p / q) * q;
        } else {
            (p, q) = (-q, p);
        }
        steps += 1;
        if steps > 10_000 {
            return None;
        }
    }
}

/// The connection of the catalog with holonomy `±(x, y)`.
pub fn by_holonomy(cat: &Catalog, l2: i64, x: i64, y: i64) -> SaddleConnection {
    let want = Vec2::ints(x, y).canonical();
    cat.enumerate(&Scalar::int(l2)).into_iter().find(|sc| sc.holonomy == want).expect("connection present")
}
