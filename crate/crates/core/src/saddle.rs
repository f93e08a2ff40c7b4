//! Saddle connections: enumeration by unfolding, canonical identity and
//! interior intersection counts.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{orient, HalfTranslation, Sign, Vec2};
use crate::scalar::Scalar;
use crate::surface::{EdgeRef, Surface};
use crate::trace::{normalize_corner, trace, word_sign, BoundaryPos, Limits, Piece, SurfacePoint, Terminal, DEFAULT_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaddleConnection {
    pub id: String,
    /// Global corner where the canonical orientation starts.
    pub start: usize,
    pub end: usize,
    /// Developed vector from start to end, in the chart of the start polygon.
    pub direction: Vec2,
    /// Vector from the end back to the start, in the chart of the end polygon.
    pub end_direction: Vec2,
    pub word: Vec<EdgeRef>,
    pub pieces: Vec<Piece>,
    pub len2: Scalar,
    /// Representative of `±direction` with `y > 0`, or `y = 0, x > 0`.
    pub holonomy: Vec2,
    /// Canonical side of the glued edge pair when the connection is a polygon edge.
    pub boundary_edge: Option<EdgeRef>,
    /// Product of the frame signs along the crossing word.
    pub twist: Sign,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScRecord {
    pub id: String,
    pub start: usize,
    pub end: usize,
    pub holx: [String; 2],
    pub holy: [String; 2],
    pub len2: [String; 2],
}

impl SaddleConnection {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn start_class(&self, s: &Surface) -> usize {
        s.class_of(self.start)
    }

    pub fn end_class(&self, s: &Surface) -> usize {
        s.class_of(self.end)
    }

    pub fn record(&self, s: &Surface) -> ScRecord {
        ScRecord {
            id: self.id.clone(),
            start: self.start_class(s),
            end: self.end_class(s),
            holx: self.holonomy.x.pair(),
            holy: self.holonomy.y.pair(),
            len2: self.len2.pair(),
        }
    }

    /// Ordering used everywhere: squared length, then id.
    pub fn canonical_cmp(&self, o: &SaddleConnection) -> Ordering {
        self.len2.cmp(&o.len2).then_with(|| self.id.cmp(&o.id))
    }

    /// The same connection traversed the other way: start corner, direction and pieces.
    pub fn reversed(&self, s: &Surface) -> Oriented {
        let (c, d) = normalize_corner(s, self.end, &self.end_direction).expect("end direction in sector");
        oriented(s, c, &d, None).expect("reverse trace closes")
    }

    pub fn forward(&self) -> Oriented {
        Oriented {
            start: self.start,
            direction: self.direction.clone(),
            end: self.end,
            end_direction: self.end_direction.clone(),
            word: self.word.clone(),
            pieces: self.pieces.clone(),
        }
    }
}

/// A saddle connection with a chosen orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oriented {
    pub start: usize,
    pub direction: Vec2,
    pub end: usize,
    pub end_direction: Vec2,
    pub word: Vec<EdgeRef>,
    pub pieces: Vec<Piece>,
}

fn word_key(word: &[EdgeRef]) -> String {
    word.iter().map(|e| format!("{}.{}", e.poly, e.edge)).collect::<Vec<_>>().join("_")
}

pub(crate) fn rep_key(start: usize, dir: &Vec2, word: &[EdgeRef]) -> String {
    format!("v{}:h{}:w{}", start, dir.key(), word_key(word))
}

fn reverse_word(s: &Surface, word: &[EdgeRef]) -> Vec<EdgeRef> {
    word.iter().rev().map(|e| s.partner(*e).0).collect()
}

/// Traces from a corner whose half-open sector contains `dir`.
pub(crate) fn oriented(s: &Surface, c: usize, dir: &Vec2, budget: Option<usize>) -> Option<Oriented> {
    let lim = Limits { max_len2: None, max_crossings: Some(budget.unwrap_or(DEFAULT_BUDGET)) };
    let t = trace(s, &SurfacePoint::Corner(c), dir, &lim);
    match t.terminal {
        Terminal::HitMarked { corner, .. } => {
            let last = t.pieces.last().unwrap();
            let developed = last.placement.apply(&last.to) - s.corner_point(c).clone();
            debug_assert!(developed.same_ray(dir));
            let end_direction = -last.placement.sign.apply(&developed);
            Some(Oriented {
                start: c,
                direction: developed,
                end: corner,
                end_direction,
                word: t.crossings,
                pieces: t.pieces,
            })
        }
        Terminal::BudgetExceeded => None,
    }
}

fn boundary_edge_of(s: &Surface, o: &Oriented) -> Option<EdgeRef> {
    if !o.word.is_empty() || o.pieces.len() != 1 {
        return None;
    }
    let (p, k) = s.corner_ref(o.start);
    let e = EdgeRef::new(p, k);
    if s.edge_vec(e) == o.direction {
        Some(s.canonical_edge(e))
    } else {
        None
    }
}

fn finish(s: &Surface, o: Oriented, id: String) -> SaddleConnection {
    let len2 = o.direction.norm2();
    let holonomy = o.direction.canonical();
    let boundary_edge = boundary_edge_of(s, &o);
    let twist = word_sign(s, &o.word);
    SaddleConnection {
        id,
        start: o.start,
        end: o.end,
        direction: o.direction,
        end_direction: o.end_direction,
        word: o.word,
        pieces: o.pieces,
        len2,
        holonomy,
        boundary_edge,
        twist,
    }
}

/// Puts an oriented trace into canonical orientation.
pub(crate) fn canonicalize(s: &Surface, o: Oriented) -> SaddleConnection {
    let kf = rep_key(o.start, &o.direction, &o.word);
    let (rc, rd) = normalize_corner(s, o.end, &o.end_direction).expect("end direction in closed sector");
    let rw = reverse_word(s, &o.word);
    let kr = rep_key(rc, &rd, &rw);
    if kf <= kr {
        finish(s, o, kf)
    } else {
        let r = oriented(s, rc, &rd, Some(o.word.len() + 1)).expect("reverse trace closes");
        debug_assert_eq!(r.word, rw);
        finish(s, r, kr)
    }
}

/// The saddle connection leaving corner `c` in direction `dir` (closed sector),
/// traced without a length bound.
pub fn sc_from_corner_dir(s: &Surface, c: usize, dir: &Vec2, budget: Option<usize>) -> Result<SaddleConnection> {
    if !dir.in_field(s.field_d()) {
        return Err(Error::DirectionLeavesField);
    }
    let (c2, d2) = normalize_corner(s, c, dir)
        .ok_or_else(|| Error::InvalidArgument(format!("direction {dir} outside the sector of corner {c}")))?;
    let o = oriented(s, c2, &d2, budget).ok_or(Error::NoHitWithinBudget)?;
    Ok(canonicalize(s, o))
}

struct Found {
    start: usize,
    dir: Vec2,
    word: Vec<EdgeRef>,
    end: usize,
    twist: Sign,
}

struct Frame {
    poly: usize,
    placement: HalfTranslation,
    exit: usize,
    right: Vec2,
    left: Vec2,
    word: Vec<EdgeRef>,
}

fn ray_hit(o: &Vec2, r: &Vec2, a: &Vec2, b: &Vec2) -> Vec2 {
    let ab = b - a;
    let k = &(a - o).cross(&ab) / &r.cross(&ab);
    o + &r.scale(&k)
}

fn seg_dist2(o: &Vec2, p: &Vec2, q: &Vec2) -> Scalar {
    let d = q - p;
    let dd = d.norm2();
    if dd.is_zero() {
        return (p - o).norm2();
    }
    let t = &(o - p).dot(&d) / &dd;
    let t = if t.is_negative() {
        Scalar::zero()
    } else if t > Scalar::one() {
        Scalar::one()
    } else {
        t
    };
    (&(p + &d.scale(&t)) - o).norm2()
}

fn strictly_between(r: &Vec2, l: &Vec2, w: &Vec2) -> bool {
    r.cross(w).is_positive() && w.cross(l).is_positive()
}

/// Interior (non-edge) connections seen from one corner.
fn unfold_corner(s: &Surface, c: usize, l2: &Scalar) -> Vec<Found> {
    let (p, k) = s.corner_ref(c);
    let pg = s.polygon(p);
    let n = pg.len();
    let o = pg.vertex(k).clone();
    let (u1, u2) = s.sector(c);
    let mut out = Vec::new();
    for j in 0..n {
        if j == k || j == (k + 1) % n || j == (k + n - 1) % n {
            continue;
        }
        let w = pg.vertex(j) - &o;
        if w.norm2() <= *l2 {
            out.push(Found { start: c, dir: w, word: Vec::new(), end: s.corner(p, j), twist: Sign::Plus });
        }
    }
    let mut stack: Vec<Frame> = Vec::new();
    for j in 0..n {
        if j == k || (j + 1) % n == k {
            continue;
        }
        stack.push(Frame {
            poly: p,
            placement: HalfTranslation::identity(),
            exit: j,
            right: u1.clone(),
            left: u2.clone(),
            word: Vec::new(),
        });
    }
    while let Some(f) = stack.pop() {
        let dv = s.developed_vertices(f.poly, &f.placement);
        let m = dv.len();
        let a = &dv[f.exit];
        let b = &dv[(f.exit + 1) % m];
        let ao = a - &o;
        let bo = b - &o;
        let right = if f.right.cross(&ao).is_positive() { ao } else { f.right.clone() };
        let left = if bo.cross(&f.left).is_positive() { bo } else { f.left.clone() };
        if !right.cross(&left).is_positive() {
            continue;
        }
        let pr = ray_hit(&o, &right, a, b);
        let pl = ray_hit(&o, &left, a, b);
        if seg_dist2(&o, &pr, &pl) > *l2 {
            continue;
        }
        let e = EdgeRef::new(f.poly, f.exit);
        let (g, placement) = s.cross_edge(&f.placement, e);
        let mut word = f.word.clone();
        word.push(e);
        let nv = s.developed_vertices(g.poly, &placement);
        let nm = nv.len();
        for (i, w) in nv.iter().enumerate() {
            if i == g.edge || i == (g.edge + 1) % nm {
                continue;
            }
            let wo = w - &o;
            if strictly_between(&right, &left, &wo) && wo.norm2() <= *l2 {
                out.push(Found {
                    start: c,
                    dir: wo,
                    word: word.clone(),
                    end: s.corner(g.poly, i),
                    twist: placement.sign,
                });
            }
        }
        for i in 0..nm {
            if i == g.edge {
                continue;
            }
            if orient(&o, &nv[i], &nv[(i + 1) % nm]) > 0 {
                stack.push(Frame {
                    poly: g.poly,
                    placement: placement.clone(),
                    exit: i,
                    right: right.clone(),
                    left: left.clone(),
                    word: word.clone(),
                });
            }
        }
    }
    out
}

/// All saddle connections with squared holonomy length at most `l2`, each once,
/// ordered by squared length and then id.
/// Reconstructs a connection from its id by retracing its first representation.
pub fn from_id(s: &Surface, id: &str) -> Result<SaddleConnection> {
    let bad = || Error::UnknownVertex(id.to_string());
    let rest = id.strip_prefix('v').ok_or_else(bad)?;
    let (corner, rest) = rest.split_once(":h").ok_or_else(bad)?;
    let (hol, _) = rest.split_once(":w").ok_or_else(bad)?;
    let c: usize = corner.parse().map_err(|_| bad())?;
    let (x, y) = hol.split_once(',').ok_or_else(bad)?;
    let dir = Vec2::new(Scalar::parse(x, s.field_d()).map_err(|_| bad())?, Scalar::parse(y, s.field_d()).map_err(|_| bad())?);
    if c >= s.num_corners() || dir.is_zero() {
        return Err(bad());
    }
    let sc = sc_from_corner_dir(s, c, &dir, None).map_err(|_| bad())?;
    if sc.id != id {
        return Err(bad());
    }
    Ok(sc)
}

pub fn enumerate(s: &Surface, l2: &Scalar) -> Vec<SaddleConnection> {
    let corners: Vec<usize> = (0..s.num_corners()).collect();
    #[cfg(feature = "parallel")]
    let found: Vec<Vec<Found>> = {
        use rayon::prelude::*;
        corners.par_iter().map(|&c| unfold_corner(s, c, l2)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let found: Vec<Vec<Found>> = corners.iter().map(|&c| unfold_corner(s, c, l2)).collect();
    // each interior connection is found from both ends; keep the smaller representation
    let mut best: BTreeMap<String, (usize, Vec2)> = BTreeMap::new();
    for f in found.into_iter().flatten() {
        let kf = rep_key(f.start, &f.dir, &f.word);
        let rdir = -f.twist.apply(&f.dir);
        let kr = rep_key(f.end, &rdir, &reverse_word(s, &f.word));
        if kf <= kr {
            best.insert(kf, (f.start, f.dir));
        } else {
            best.insert(kr, (f.end, rdir));
        }
    }
    let mut reps: Vec<(usize, Vec2)> = best.into_values().collect();
    for g in s.gluings() {
        let e = g.from;
        let v = s.edge_vec(e);
        if v.norm2() <= *l2 {
            reps.push((s.corner(e.poly, e.edge), v));
        }
    }
    let traced: Vec<SaddleConnection> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            reps.par_iter()
                .map(|(c, d)| canonicalize(s, oriented(s, *c, d, None).expect("found connection closes")))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            reps.iter()
                .map(|(c, d)| canonicalize(s, oriented(s, *c, d, None).expect("found connection closes")))
                .collect()
        }
    };
    let mut out = traced;
    out.sort_by(|a, b| a.canonical_cmp(b));
    out
}

pub fn sc_id(sc: &SaddleConnection) -> &str {
    &sc.id
}

/// Caches the largest enumeration computed so far.
pub struct Catalog<'a> {
    pub surface: &'a Surface,
    cache: RefCell<Option<(Scalar, Vec<SaddleConnection>)>>,
}

impl<'a> Catalog<'a> {
    pub fn new(surface: &'a Surface) -> Self {
        Catalog { surface, cache: RefCell::new(None) }
    }

    pub fn enumerate(&self, l2: &Scalar) -> Vec<SaddleConnection> {
        if let Some((b, list)) = self.cache.borrow().as_ref() {
            if *b >= *l2 {
                return list.iter().filter(|sc| sc.len2 <= *l2).cloned().collect();
            }
        }
        let list = enumerate(self.surface, l2);
        *self.cache.borrow_mut() = Some((l2.clone(), list.clone()));
        list
    }
}

/// Position on the boundary of a polygon, comparable along the boundary.
fn boundary_key(pos: &BoundaryPos) -> (usize, Scalar) {
    match pos {
        BoundaryPos::Corner(k) => (*k, Scalar::zero()),
        BoundaryPos::Edge(e, t) => (*e, t.clone()),
        BoundaryPos::Interior => panic!("saddle connection pieces start on the boundary"),
    }
}

/// Whether two chords with distinct endpoints on a convex boundary interleave.
pub(crate) fn interleave<T: Ord>(a0: T, a1: T, b0: T, b1: T) -> bool {
    if a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1 {
        return false;
    }
    let (lo, hi) = if a0 < a1 { (a0, a1) } else { (a1, a0) };
    let in0 = b0 > lo && b0 < hi;
    let in1 = b1 > lo && b1 < hi;
    in0 != in1
}

/// Edge-interior points where `sc` crosses, on the canonical side of each edge pair.
fn canonical_crossings(s: &Surface, sc: &SaddleConnection) -> Vec<(EdgeRef, Scalar)> {
    let mut out = Vec::new();
    for p in &sc.pieces {
        for pos in [&p.from_pos, &p.to_pos] {
            if let BoundaryPos::Edge(e, t) = pos {
                let er = EdgeRef::new(p.poly, *e);
                if s.canonical_edge(er) == er {
                    out.push((er, t.clone()));
                }
            }
        }
    }
    out
}

/// Number of transverse crossings in the interiors of both connections.
pub fn intersections(s: &Surface, a: &SaddleConnection, b: &SaddleConnection) -> usize {
    if a.id == b.id {
        return 0;
    }
    match (a.boundary_edge, b.boundary_edge) {
        (Some(_), Some(_)) => 0,
        (Some(e), None) => canonical_crossings(s, b).iter().filter(|(f, _)| *f == e).count(),
        (None, Some(e)) => canonical_crossings(s, a).iter().filter(|(f, _)| *f == e).count(),
        (None, None) => {
            let mut count = 0;
            for pa in &a.pieces {
                for pb in &b.pieces {
                    if pa.poly != pb.poly {
                        continue;
                    }
                    if interleave(
                        boundary_key(&pa.from_pos),
                        boundary_key(&pa.to_pos),
                        boundary_key(&pb.from_pos),
                        boundary_key(&pb.to_pos),
                    ) {
                        count += 1;
                    }
                }
            }
            let cb = canonical_crossings(s, b);
            for x in canonical_crossings(s, a) {
                if cb.contains(&x) {
                    count += 1;
                }
            }
            count
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;

    fn by_hol<'a>(v: &'a [SaddleConnection], x: i64, y: i64) -> &'a SaddleConnection {
        let h = Vec2::ints(x, y).canonical();
        v.iter().find(|sc| sc.holonomy == h).unwrap()
    }

    #[test]
    fn torus_counts() {
        let s = builtin("square_torus").unwrap();
        assert_eq!(enumerate(&s, &Scalar::int(1)).len(), 2);
        assert_eq!(enumerate(&s, &Scalar::int(2)).len(), 4);
        // 24 primitive vectors mod ± with p²+q² ≤ 25; four of them have length exactly 5
        assert_eq!(enumerate(&s, &Scalar::int(25)).len(), 24);
        assert_eq!(enumerate(&s, &Scalar::int(24)).len(), 20);
    }

    #[test]
    fn torus_ids() {
        let s = builtin("square_torus").unwrap();
        let v = enumerate(&s, &Scalar::int(1));
        assert_eq!(v[0].id, "v0:h1/1+0/1r,0/1+0/1r:w");
        assert_eq!(v[1].id, "v1:h0/1+0/1r,1/1+0/1r:w");
    }

    #[test]
    fn torus_intersections() {
        let s = builtin("square_torus").unwrap();
        let v = enumerate(&s, &Scalar::int(5));
        let (a, b, c, d) = (by_hol(&v, 1, 0), by_hol(&v, 0, 1), by_hol(&v, 1, 2), by_hol(&v, 2, 1));
        assert_eq!(intersections(&s, a, b), 0);
        assert_eq!(intersections(&s, a, c), 1);
        assert_eq!(intersections(&s, c, d), 2);
        assert_eq!(intersections(&s, d, c), 2);
        assert_eq!(intersections(&s, c, c), 0);
    }
}
