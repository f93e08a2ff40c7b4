//! Directional flow: first marked point met by a flowed segment, and cylinder
//! decompositions of periodic directions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{HalfTranslation, Sign, Vec2};
use crate::saddle::{canonicalize, oriented, SaddleConnection};
use crate::scalar::Scalar;
use crate::surface::{EdgeRef, Surface};
use crate::trace::{BoundaryPos, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FirstHit {
    /// Marked point class that is met.
    pub class: usize,
    /// Corner at which it is met.
    pub corner: usize,
    /// Flow parameter: the hit point is `P(foot) + param * w`.
    pub param: Scalar,
    /// Squared flow distance, `param² |w|²`.
    pub distance2: Scalar,
    /// Parameter in `[0,1]` along the segment.
    pub foot: Scalar,
    /// The hit point, developed from the polygon of the start corner.  When the
    /// segment runs back along the incoming edge of `c` this is the next corner.
    pub point: Vec2,
}

impl FirstHit {
    /// The flow distance itself when it is rational.
    pub fn distance(&self) -> Option<Scalar> {
        exact_sqrt(&self.distance2)
    }
}

/// Square root of a non-negative rational perfect square.
pub fn exact_sqrt(x: &Scalar) -> Option<Scalar> {
    if !x.is_rational() || x.is_negative() {
        return None;
    }
    let r = x.rational_part();
    let (n, d) = (r.numer().abs(), r.denom().clone());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    if &sn * &sn == n && &sd * &sd == d {
        Some(Scalar::rational(BigRational::new(sn, sd)))
    } else {
        None
    }
}

/// A piece of the flowed strip: flow lines with foot in `[t0, t1]` entering
/// `poly` through the developed segment `e0 e1`.
struct Beam {
    amin: Scalar,
    poly: usize,
    placement: HalfTranslation,
    e0: Vec2,
    e1: Vec2,
    t0: Scalar,
    t1: Scalar,
}

impl PartialEq for Beam {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Beam {}
impl PartialOrd for Beam {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Beam {
    // reversed: BinaryHeap pops the smallest entry parameter
    fn cmp(&self, o: &Self) -> Ordering {
        o.amin.cmp(&self.amin).then_with(|| o.t0.cmp(&self.t0))
    }
}

struct Strip {
    p0: Vec2,
    v: Vec2,
    w: Vec2,
    det: Scalar,
}

impl Strip {
    /// `(t, a)` with `z = p0 + t v + a w`.
    fn coords(&self, z: &Vec2) -> (Scalar, Scalar) {
        let r = z - &self.p0;
        (&r.cross(&self.w) / &self.det, &self.v.cross(&r) / &self.det)
    }
}

/// Flows the saddle connection leaving corner `c` with holonomy `v` (chart of
/// `c`) in direction `w` and returns the first marked point met at positive
/// flow time.  Ties go to the smaller foot parameter, then the smaller class.
/// With `open` the rays from the two endpoints are left out.
pub fn first_hit(s: &Surface, c: usize, v: &Vec2, w: &Vec2, open: bool, budget: Option<usize>) -> Result<FirstHit> {
    let d = s.field_d();
    if !v.in_field(d) || !w.in_field(d) {
        return Err(Error::DirectionLeavesField);
    }
    if v.is_zero() {
        return Err(Error::PreconditionViolated("transversal has length zero".into()));
    }
    if c >= s.num_corners() {
        return Err(Error::InvalidArgument(format!("no corner {c}")));
    }
    let det = v.cross(w);
    if det.is_zero() {
        return Err(Error::PreconditionViolated("flow direction parallel to the transversal".into()));
    }
    let budget = budget.unwrap_or(DEFAULT_BUDGET);
    let o = crate::trace::normalize_corner(s, c, v)
        .and_then(|(c2, v2)| oriented(s, c2, &v2, Some(budget)).map(|o| (c2, v2, o)));
    let (c2, v2, o) = o.ok_or_else(|| Error::PreconditionViolated("transversal does not end at a marked point".into()))?;
    if o.direction != v2 {
        return Err(Error::PreconditionViolated("transversal passes through a marked point".into()));
    }
    // the frame of c2 differs from that of c by the sign taking v to v2
    let w = if &v2 == v { w.clone() } else { -w };
    let (p0poly, k0) = s.corner_ref(c2);
    let strip = Strip { p0: s.polygon(p0poly).vertex(k0).clone(), v: v2.clone(), w: w.clone(), det: v2.cross(&w) };

    let mut heap = BinaryHeap::new();
    for piece in &o.pieces {
        let a = piece.placement.apply(&piece.from);
        let b = piece.placement.apply(&piece.to);
        let (ta, _) = strip.coords(&a);
        let (tb, _) = strip.coords(&b);
        let mut poly = piece.poly;
        let mut placement = piece.placement.clone();
        // a piece running along an edge flows into the neighbour on the flow side
        if let (BoundaryPos::Corner(i), BoundaryPos::Corner(j)) = (&piece.from_pos, &piece.to_pos) {
            let n = s.polygon(poly).len();
            let along = if (i + 1) % n == *j {
                Some(*i)
            } else if (j + 1) % n == *i {
                Some(*j)
            } else {
                None
            };
            if let Some(e) = along {
                let inward = s.polygon(poly).edge_vec(e).perp();
                let wl = placement.sign.apply(&w);
                if !inward.dot(&wl).is_positive() {
                    let (f, np) = s.cross_edge(&placement, EdgeRef::new(poly, e));
                    poly = f.poly;
                    placement = np;
                }
            }
        }
        heap.push(Beam { amin: Scalar::zero(), poly, placement, e0: a, e1: b, t0: ta, t1: tb });
    }

    let mut best: Option<FirstHit> = None;
    let mut crossings = 0usize;
    while let Some(beam) = heap.pop() {
        if let Some(b) = &best {
            if beam.amin >= b.param {
                break;
            }
        }
        let pg = s.polygon(beam.poly);
        let n = pg.len();
        let dev: Vec<Vec2> = (0..n).map(|k| beam.placement.apply(pg.vertex(k))).collect();
        let entry = &beam.e1 - &beam.e0;
        let ahead_sign = entry.cross(&w).signum();
        for (k, z) in dev.iter().enumerate() {
            if entry.cross(&(z - &beam.e0)).signum() != ahead_sign {
                continue;
            }
            let (t, a) = strip.coords(z);
            if t < beam.t0 || t > beam.t1 || !a.is_positive() {
                continue;
            }
            if open && (t.is_zero() || t.is_one()) {
                continue;
            }
            let corner = s.corner(beam.poly, k);
            let cand = FirstHit {
                class: s.class_of(corner),
                corner,
                distance2: &a.square() * &w.norm2(),
                param: a,
                foot: t,
                point: z.clone(),
            };
            let better = match &best {
                None => true,
                Some(b) => (&cand.param, &cand.foot, cand.class) < (&b.param, &b.foot, b.class),
            };
            if better {
                best = Some(cand);
            }
        }
        for j in 0..n {
            let a = &dev[j];
            let b = &dev[(j + 1) % n];
            if !w.cross(&(b - a)).is_positive() {
                continue;
            }
            let (ta, _) = strip.coords(a);
            let (tb, _) = strip.coords(b);
            let (lo, hi) = if ta <= tb { (ta.clone(), tb.clone()) } else { (tb.clone(), ta.clone()) };
            let lo = lo.max(beam.t0.clone());
            let hi = hi.min(beam.t1.clone());
            if lo >= hi {
                continue;
            }
            crossings += 1;
            if crossings > budget {
                return Err(Error::NoHitWithinBudget);
            }
            let at = |t: &Scalar| -> Vec2 {
                let lam = &(t - &ta) / &(&tb - &ta);
                a + &(b - a).scale(&lam)
            };
            let (e0, e1) = (at(&lo), at(&hi));
            let amin = strip.coords(&e0).1.min(strip.coords(&e1).1);
            let (f, np) = s.cross_edge(&beam.placement, EdgeRef::new(beam.poly, j));
            heap.push(Beam { amin, poly: f.poly, placement: np, e0, e1, t0: lo, t1: hi });
        }
    }
    best.ok_or(Error::NoHitWithinBudget)
}

/// First hit when flowing perpendicular to the transversal, to its left or right.
pub fn flow_interval_first_hit(s: &Surface, c: usize, v: &Vec2, side: Side) -> Result<FirstHit> {
    let w = match side {
        Side::Left => v.perp(),
        Side::Right => -v.perp(),
    };
    first_hit(s, c, v, &w, false, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cylinder {
    pub direction: Vec2,
    pub area: Scalar,
    pub circumference2: Scalar,
    pub height2: Scalar,
    /// Exact values when the squares above are rational squares.
    pub circumference: Option<Scalar>,
    pub height: Option<Scalar>,
    /// Boundary on the left of the direction, then on the right.
    pub boundary_plus: Vec<String>,
    pub boundary_minus: Vec<String>,
    pub simple_plus: bool,
    pub simple_minus: bool,
}

impl Cylinder {
    pub fn is_simple(&self) -> bool {
        self.simple_plus && self.simple_minus
    }

    pub fn is_semisimple(&self) -> bool {
        self.simple_plus || self.simple_minus
    }
}

/// Horizontal band `y0 < cross(dir, z) < y1` of one polygon inside one cylinder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slab {
    pub poly: usize,
    pub y0: Scalar,
    pub y1: Scalar,
    pub cylinder: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Decomposition {
    Periodic {
        direction: Vec2,
        cylinders: Vec<Cylinder>,
        saddle_connections: Vec<String>,
        #[serde(skip)]
        slabs: Vec<Slab>,
    },
    Unknown,
}

impl Decomposition {
    pub fn cylinders(&self) -> Option<&[Cylinder]> {
        match self {
            Decomposition::Periodic { cylinders, .. } => Some(cylinders),
            Decomposition::Unknown => None,
        }
    }

    /// Index of the cylinder containing the point `z` of polygon `poly`, or
    /// `None` when the point lies on a parallel saddle connection.
    pub fn cylinder_at(&self, poly: usize, z: &Vec2) -> Option<usize> {
        let Decomposition::Periodic { direction, slabs, .. } = self else {
            return None;
        };
        let y = direction.cross(z);
        slabs.iter().find(|sl| sl.poly == poly && sl.y0 < y && y < sl.y1).map(|sl| sl.cylinder)
    }
}

/// All saddle connections parallel to `dir`, or `None` when some separatrix
/// does not close within the budget.
pub fn parallel_connections(s: &Surface, dir: &Vec2, budget: Option<usize>) -> Result<Option<Vec<SaddleConnection>>> {
    if !dir.in_field(s.field_d()) {
        return Err(Error::DirectionLeavesField);
    }
    if dir.is_zero() {
        return Err(Error::InvalidArgument("zero direction".into()));
    }
    let mut found: BTreeMap<String, SaddleConnection> = BTreeMap::new();
    for c in 0..s.num_corners() {
        for d in [dir.clone(), -dir] {
            if !s.in_sector(c, &d) {
                continue;
            }
            match oriented(s, c, &d, Some(budget.unwrap_or(DEFAULT_BUDGET))) {
                Some(o) => {
                    let sc = canonicalize(s, o);
                    found.entry(sc.id.clone()).or_insert(sc);
                }
                None => return Ok(None),
            }
        }
    }
    Ok(Some(found.into_values().collect()))
}

fn find(uf: &mut [(usize, bool)], i: usize) -> (usize, bool) {
    let (p, par) = uf[i];
    if p == i {
        return (i, false);
    }
    let (r, pr) = find(uf, p);
    uf[i] = (r, par ^ pr);
    (r, par ^ pr)
}

/// Chord length of `poly` at height `y`, in units of `dir`.
fn chord(s: &Surface, poly: usize, dir: &Vec2, y: &Scalar) -> Scalar {
    let pg = s.polygon(poly);
    let n = pg.len();
    let dd = dir.norm2();
    let mut xs: Vec<Scalar> = Vec::new();
    for j in 0..n {
        let a = pg.vertex(j);
        let b = pg.vertex(j + 1);
        let (ya, yb) = (dir.cross(a), dir.cross(b));
        if ya == yb {
            continue;
        }
        let (lo, hi) = if ya < yb { (&ya, &yb) } else { (&yb, &ya) };
        if y < lo || y > hi {
            continue;
        }
        let t = &(y - &ya) / &(&yb - &ya);
        let z = a + &(b - a).scale(&t);
        xs.push(&dir.dot(&z) / &dd);
    }
    match (xs.iter().min(), xs.iter().max()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => Scalar::zero(),
    }
}

/// Cylinder decomposition in direction `dir`, certified by closing every
/// separatrix; `Unknown` when some separatrix exceeds the crossing budget.
pub fn direction_decomposition(s: &Surface, dir: &Vec2, budget: Option<usize>) -> Result<Decomposition> {
    let Some(scs) = parallel_connections(s, dir, budget)? else {
        return Ok(Decomposition::Unknown);
    };
    let np = s.polygons().len();
    // heights of connection pieces per polygon
    let mut level: Vec<BTreeMap<Scalar, String>> = vec![BTreeMap::new(); np];
    for sc in &scs {
        for p in &sc.pieces {
            level[p.poly].insert(dir.cross(&p.from), sc.id.clone());
        }
        if let Some(e) = sc.boundary_edge {
            for f in [e, s.partner(e).0] {
                level[f.poly].insert(dir.cross(s.polygon(f.poly).vertex(f.edge)), sc.id.clone());
            }
        }
    }
    let mut slabs: Vec<Slab> = Vec::new();
    let mut slab_index: Vec<Vec<usize>> = vec![Vec::new(); np];
    for (p, lv) in level.iter().enumerate() {
        let mut cuts: BTreeSet<Scalar> = lv.keys().cloned().collect();
        for v in &s.polygon(p).vertices {
            cuts.insert(dir.cross(v));
        }
        let cuts: Vec<Scalar> = cuts.into_iter().collect();
        for w in cuts.windows(2) {
            slab_index[p].push(slabs.len());
            slabs.push(Slab { poly: p, y0: w[0].clone(), y1: w[1].clone(), cylinder: 0 });
        }
    }
    let locate = |p: usize, y: &Scalar| -> usize {
        *slab_index[p]
            .iter()
            .find(|&&i| slabs[i].y0 < *y && *y < slabs[i].y1)
            .expect("height inside a slab")
    };
    let mut uf: Vec<(usize, bool)> = (0..slabs.len()).map(|i| (i, false)).collect();
    let two = Scalar::int(2);
    for (i, sl) in slabs.iter().enumerate() {
        let pg = s.polygon(sl.poly);
        let ym = &(&sl.y0 + &sl.y1) / &two;
        let n = pg.len();
        let j = (0..n)
            .find(|&j| {
                let (a, b) = (pg.vertex(j), pg.vertex(j + 1));
                let (ya, yb) = (dir.cross(a), dir.cross(b));
                dir.cross(&(b - a)).is_positive() && ya < ym && ym < yb
            })
            .expect("slab has an exit edge");
        let (a, b) = (pg.vertex(j), pg.vertex(j + 1));
        let (ya, yb) = (dir.cross(a), dir.cross(b));
        let z = a + &(b - a).scale(&(&(&ym - &ya) / &(&yb - &ya)));
        let e = EdgeRef::new(sl.poly, j);
        let g = s.glue_map(e);
        let k = locate(s.partner(e).0.poly, &dir.cross(&g.apply(&z)));
        let flip = g.sign == Sign::Minus;
        let (ri, pi) = find(&mut uf, i);
        let (rk, pk) = find(&mut uf, k);
        if ri != rk {
            uf[ri] = (rk, pi ^ pk ^ flip);
        }
    }
    let mut groups: BTreeMap<usize, Vec<(usize, bool)>> = BTreeMap::new();
    for i in 0..slabs.len() {
        let (r, par) = find(&mut uf, i);
        groups.entry(r).or_default().push((i, par));
    }
    let dd = dir.norm2();
    let mut cylinders = Vec::new();
    for (ci, members) in groups.values().enumerate() {
        for &(i, _) in members {
            slabs[i].cylinder = ci;
        }
        let mut area = Scalar::zero();
        let mut plus = BTreeSet::new();
        let mut minus = BTreeSet::new();
        let delta = {
            let sl = &slabs[members[0].0];
            &sl.y1 - &sl.y0
        };
        for &(i, par) in members {
            let sl = &slabs[i];
            debug_assert_eq!(&sl.y1 - &sl.y0, delta);
            let l0 = chord(s, sl.poly, dir, &sl.y0);
            let l1 = chord(s, sl.poly, dir, &sl.y1);
            area += &(&(&(&l0 + &l1) * &(&sl.y1 - &sl.y0)) / &two);
            let (top, bottom) = if par { (&mut minus, &mut plus) } else { (&mut plus, &mut minus) };
            if let Some(id) = level[sl.poly].get(&sl.y1) {
                top.insert(id.clone());
            }
            if let Some(id) = level[sl.poly].get(&sl.y0) {
                bottom.insert(id.clone());
            }
        }
        let height2 = &delta.square() / &dd;
        let circumference2 = &(&area.square() * &dd) / &delta.square();
        cylinders.push(Cylinder {
            direction: dir.clone(),
            circumference: exact_sqrt(&circumference2),
            height: exact_sqrt(&height2),
            area,
            circumference2,
            height2,
            simple_plus: plus.len() == 1,
            simple_minus: minus.len() == 1,
            boundary_plus: plus.into_iter().collect(),
            boundary_minus: minus.into_iter().collect(),
        });
    }
    let mut order: Vec<usize> = (0..cylinders.len()).collect();
    order.sort_by(|&a, &b| {
        let (a, b) = (&cylinders[a], &cylinders[b]);
        (&a.height2, &a.circumference2, &a.boundary_plus).cmp(&(&b.height2, &b.circumference2, &b.boundary_plus))
    });
    let mut rank = vec![0; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    for sl in slabs.iter_mut() {
        sl.cylinder = rank[sl.cylinder];
    }
    let mut sorted: Vec<Option<Cylinder>> = cylinders.into_iter().map(Some).collect();
    let cylinders = order.iter().map(|&i| sorted[i].take().unwrap()).collect();
    Ok(Decomposition::Periodic {
        direction: dir.clone(),
        cylinders,
        saddle_connections: scs.into_iter().map(|sc| sc.id).collect(),
        slabs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;

    #[test]
    fn torus_first_hits() {
        let s = builtin("square_torus").unwrap();
        let c = (0..s.num_corners()).find(|&c| s.corner_point(c) == &Vec2::ints(0, 0)).unwrap();
        let h = flow_interval_first_hit(&s, c, &Vec2::ints(0, 1), Side::Right).unwrap();
        assert_eq!(h.param, Scalar::one());
        assert_eq!(h.foot, Scalar::zero());
        let h = first_hit(&s, c, &Vec2::ints(1, 1), &Vec2::ints(1, -1), false, None).unwrap();
        assert_eq!(h.foot, Scalar::frac(1, 2));
        assert_eq!(h.distance2, Scalar::frac(1, 2));
        assert!(first_hit(&s, c, &Vec2::ints(1, 1), &Vec2::ints(2, 2), false, None).is_err());
    }

    #[test]
    fn torus_horizontal_cylinder() {
        let s = builtin("square_torus").unwrap();
        let d = direction_decomposition(&s, &Vec2::ints(1, 0), None).unwrap();
        let cyl = d.cylinders().unwrap();
        assert_eq!(cyl.len(), 1);
        assert_eq!(cyl[0].circumference, Some(Scalar::one()));
        assert_eq!(cyl[0].height, Some(Scalar::one()));
        assert!(cyl[0].is_simple());
        assert_eq!(cyl[0].boundary_plus, cyl[0].boundary_minus);
    }

    #[test]
    fn octagon_horizontal_cylinders() {
        let s = builtin("regular_octagon").unwrap();
        let d = direction_decomposition(&s, &Vec2::ints(1, 0), None).unwrap();
        let cyl = d.cylinders().unwrap();
        assert_eq!(cyl.len(), 2);
        let total = cyl.iter().fold(Scalar::zero(), |acc, c| &acc + &c.area);
        assert_eq!(total, s.total_area());
    }
}
