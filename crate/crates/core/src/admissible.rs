//! Admissible polygons: plane polygons mapped into the surface by a local
//! half-translation that embeds the interior and sends exactly the vertices to
//! marked points.  Also the strip extension and the pentagon constructions.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{direction_decomposition, first_hit, Cylinder, Decomposition};
use crate::geom::{seg_relation, twice_area, HalfTranslation, SegRelation, Sign, Vec2};
use crate::graph::TriangleWitness;
use crate::saddle::{oriented, sc_from_corner_dir, Catalog};
use crate::scalar::Scalar;
use crate::surface::{EdgeRef, Surface};
use crate::trace::{locate_ccw, locate_cw, normalize_corner};
use crate::triangulation::Face;

/// A developed copy of a surface polygon: `placement` maps its chart into the plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub poly: usize,
    pub placement: HalfTranslation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotSimple,
    MarkedInterior { point: Vec2 },
    MarkedOnSide { side: usize, point: Vec2 },
    VertexNotMarked { vertex: usize },
    /// Two interior points of the polygon meet in this surface polygon.
    Overlap { poly: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub admissible: bool,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissiblePolygon {
    /// Counterclockwise.
    pub vertices: Vec<Vec2>,
    pub anchor_poly: usize,
    #[serde(skip)]
    pub anchor: HalfTranslation,
    /// Ear decomposition of the polygon, by vertex index.
    pub triangles: Vec<[usize; 3]>,
    #[serde(skip)]
    pub cells: Vec<Cell>,
    /// Image of side `i`, from vertex `i` to vertex `i + 1`.
    pub side_ids: Vec<String>,
    /// Images of the diagonals of `triangles`.
    pub diagonal_ids: Vec<(usize, usize, String)>,
}

fn cross3(a: &Vec2, b: &Vec2, p: &Vec2) -> Scalar {
    (b - a).cross(&(p - a))
}

fn on_segment(p: &Vec2, a: &Vec2, b: &Vec2) -> bool {
    cross3(a, b, p).is_zero() && !(p - a).dot(&(p - b)).is_positive()
}

fn is_simple(v: &[Vec2]) -> bool {
    let n = v.len();
    if n < 3 || !twice_area(v).is_positive() {
        return false;
    }
    for i in 0..n {
        let (a, b) = (&v[i], &v[(i + 1) % n]);
        if a == b {
            return false;
        }
        // a spike folds back along the previous side
        let prev = &v[(i + n - 1) % n];
        if cross3(prev, a, b).is_zero() && (a - prev).dot(&(b - a)).is_negative() {
            return false;
        }
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (&v[j], &v[(j + 1) % n]);
            if seg_relation((a, b), (c, d)) != SegRelation::Disjoint {
                return false;
            }
        }
    }
    true
}

/// Ear clipping; vertices with a straight angle are never ears.
fn ear_clip(v: &[Vec2]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let m = idx.len();
        let mut cut = None;
        for k in 0..m {
            let (i, j, l) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            if !cross3(&v[i], &v[j], &v[l]).is_positive() {
                continue;
            }
            let blocked = idx.iter().any(|&q| {
                q != i
                    && q != j
                    && q != l
                    && !cross3(&v[i], &v[j], &v[q]).is_negative()
                    && !cross3(&v[j], &v[l], &v[q]).is_negative()
                    && !cross3(&v[l], &v[i], &v[q]).is_negative()
            });
            if !blocked {
                cut = Some(k);
                break;
            }
        }
        let k = cut.expect("simple polygon has an ear");
        out.push([idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]]);
        idx.remove(k);
    }
    out.push([idx[0], idx[1], idx[2]]);
    out
}

/// Clips a convex polygon by a counterclockwise triangle.
fn clip(poly: &[Vec2], tri: [&Vec2; 3]) -> Vec<Vec2> {
    let mut cur: Vec<Vec2> = poly.to_vec();
    for e in 0..3 {
        let (a, b) = (tri[e], tri[(e + 1) % 3]);
        let n = cur.len();
        if n == 0 {
            break;
        }
        let mut next = Vec::new();
        for i in 0..n {
            let p = &cur[i];
            let q = &cur[(i + 1) % n];
            let sp = cross3(a, b, p);
            let sq = cross3(a, b, q);
            if !sp.is_negative() {
                next.push(p.clone());
            }
            if (sp.is_positive() && sq.is_negative()) || (sp.is_negative() && sq.is_positive()) {
                let t = &sp / &(&sp - &sq);
                next.push(p + &(q - p).scale(&t));
            }
        }
        cur = next;
    }
    cur
}

/// Whether the segment `ab` runs through the interior of the polygon `v`.
fn segment_in_interior(a: &Vec2, b: &Vec2, v: &[Vec2], triangles: &[[usize; 3]]) -> bool {
    let d = b - a;
    let n = v.len();
    triangles.iter().any(|t| {
        let (mut t0, mut t1) = (Scalar::zero(), Scalar::one());
        for e in 0..3 {
            let (p, q) = (&v[t[e]], &v[t[(e + 1) % 3]]);
            let fa = cross3(p, q, a);
            let fd = &cross3(p, q, b) - &fa;
            if fd.is_zero() {
                if fa.is_negative() {
                    return false;
                }
                continue;
            }
            let r = &(-&fa) / &fd;
            if fd.is_positive() {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
        if t0 >= t1 {
            return false;
        }
        let m = a + &d.scale(&(&(&t0 + &t1) / &Scalar::int(2)));
        !(0..n).any(|i| on_segment(&m, &v[i], &v[(i + 1) % n]))
    })
}

/// Whether two convex polygons have overlapping interiors.
fn interiors_overlap(a: &[Vec2], b: &[Vec2]) -> bool {
    let separated = |p: &[Vec2], q: &[Vec2]| {
        let n = p.len();
        (0..n).any(|i| {
            let (x, y) = (&p[i], &p[(i + 1) % n]);
            x != y && q.iter().all(|z| !cross3(x, y, z).is_positive())
        })
    };
    !(separated(a, b) || separated(b, a))
}

struct Developed {
    triangles: Vec<[usize; 3]>,
    cells: Vec<Cell>,
    violations: Vec<Violation>,
}

fn develop(s: &Surface, v: &[Vec2], anchor_poly: usize, anchor: &HalfTranslation) -> Result<Developed> {
    if anchor_poly >= s.polygons().len() {
        return Err(Error::AnchorInvalid(format!("no polygon {anchor_poly}")));
    }
    if !is_simple(v) {
        return Ok(Developed { triangles: Vec::new(), cells: Vec::new(), violations: vec![Violation::NotSimple] });
    }
    let triangles = ear_clip(v);
    let meets = |dev: &[Vec2]| -> Vec<Vec<Vec2>> {
        triangles
            .iter()
            .map(|t| clip(dev, [&v[t[0]], &v[t[1]], &v[t[2]]]))
            .filter(|piece| piece.len() >= 3 && twice_area(piece).is_positive())
            .collect()
    };
    let start = Cell { poly: anchor_poly, placement: anchor.clone() };
    if meets(&s.developed_vertices(anchor_poly, anchor)).is_empty() {
        return Err(Error::AnchorInvalid("anchor polygon does not meet the interior".into()));
    }
    let mut seen: HashSet<Cell> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut cells = Vec::new();
    // (poly, cell index, piece pulled back to the chart of poly)
    let mut pieces: Vec<(usize, usize, Vec<Vec2>)> = Vec::new();
    while let Some(cell) = queue.pop_front() {
        let dev = s.developed_vertices(cell.poly, &cell.placement);
        let ci = cells.len();
        for piece in meets(&dev) {
            let back = piece.iter().map(|z| cell.placement.invert_point(z)).collect();
            pieces.push((cell.poly, ci, back));
        }
        for j in 0..dev.len() {
            if !segment_in_interior(&dev[j], &dev[(j + 1) % dev.len()], v, &triangles) {
                continue;
            }
            let (f, np) = s.cross_edge(&cell.placement, EdgeRef::new(cell.poly, j));
            let next = Cell { poly: f.poly, placement: np };
            if seen.contains(&next) {
                continue;
            }
            if !meets(&s.developed_vertices(next.poly, &next.placement)).is_empty() {
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
        cells.push(cell);
    }

    let mut violations = Vec::new();
    let n = v.len();
    let mut marked_vertex = vec![false; n];
    let mut reported: HashSet<Vec2> = HashSet::new();
    for cell in &cells {
        for z in s.developed_vertices(cell.poly, &cell.placement) {
            if let Some(k) = v.iter().position(|p| *p == z) {
                marked_vertex[k] = true;
                continue;
            }
            if reported.contains(&z) {
                continue;
            }
            if let Some(side) = (0..n).find(|&i| on_segment(&z, &v[i], &v[(i + 1) % n])) {
                reported.insert(z.clone());
                violations.push(Violation::MarkedOnSide { side, point: z });
            } else if triangles.iter().any(|t| {
                !cross3(&v[t[0]], &v[t[1]], &z).is_negative()
                    && !cross3(&v[t[1]], &v[t[2]], &z).is_negative()
                    && !cross3(&v[t[2]], &v[t[0]], &z).is_negative()
            }) {
                reported.insert(z.clone());
                violations.push(Violation::MarkedInterior { point: z });
            }
        }
    }
    for (k, ok) in marked_vertex.iter().enumerate() {
        if !ok {
            violations.push(Violation::VertexNotMarked { vertex: k });
        }
    }
    let mut overlap_polys = Vec::new();
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            let (pa, ca, a) = &pieces[i];
            let (pb, cb, b) = &pieces[j];
            if pa == pb && ca != cb && !overlap_polys.contains(pa) && interiors_overlap(a, b) {
                overlap_polys.push(*pa);
            }
        }
    }
    overlap_polys.sort();
    violations.extend(overlap_polys.into_iter().map(|poly| Violation::Overlap { poly }));
    Ok(Developed { triangles, cells, violations })
}

/// Checks the admissibility conditions for the polygon `v` developed from the
/// copy of `anchor_poly` placed by `anchor`.
pub fn is_admissible(s: &Surface, v: &[Vec2], anchor_poly: usize, anchor: &HalfTranslation) -> Result<Report> {
    let d = develop(s, v, anchor_poly, anchor)?;
    Ok(Report { admissible: d.violations.is_empty(), violations: d.violations })
}

impl AdmissiblePolygon {
    pub fn new(s: &Surface, vertices: Vec<Vec2>, anchor_poly: usize, anchor: HalfTranslation) -> Result<AdmissiblePolygon> {
        let d = develop(s, &vertices, anchor_poly, &anchor)?;
        if !d.violations.is_empty() {
            let text = serde_json::to_string(&d.violations).unwrap_or_default();
            return Err(Error::PreconditionViolated(format!("polygon is not admissible: {text}")));
        }
        let mut p = AdmissiblePolygon {
            vertices,
            anchor_poly,
            anchor,
            triangles: d.triangles,
            cells: d.cells,
            side_ids: Vec::new(),
            diagonal_ids: Vec::new(),
        };
        let n = p.vertices.len();
        for i in 0..n {
            let id = p.segment_id(s, i, (i + 1) % n)?;
            p.side_ids.push(id);
        }
        let mut diagonals = Vec::new();
        for t in &p.triangles {
            for e in 0..3 {
                let (a, b) = (t[e].min(t[(e + 1) % 3]), t[e].max(t[(e + 1) % 3]));
                if b != a + 1 && !(a == 0 && b == n - 1) && !diagonals.iter().any(|&(x, y, _)| (x, y) == (a, b)) {
                    diagonals.push((a, b, String::new()));
                }
            }
        }
        diagonals.sort();
        for d in diagonals.iter_mut() {
            d.2 = p.segment_id(s, d.0, d.1)?;
        }
        p.diagonal_ids = diagonals;
        Ok(p)
    }

    /// The triangle of a face, developed from the polygon of its first corner.
    pub fn from_face(s: &Surface, f: &Face) -> Result<AdmissiblePolygon> {
        AdmissiblePolygon::new(s, f.points.to_vec(), f.anchor_poly(s), HalfTranslation::identity())
    }

    /// The quadrilateral made of face `fa` and the face `fb` across side `ka`
    /// of `fa`, where side `kb` of `fb` is the same saddle connection.
    pub fn from_faces(s: &Surface, fa: &Face, ka: usize, fb: &Face, kb: usize) -> Result<AdmissiblePolygon> {
        let a0 = &fa.points[ka];
        let a1 = &fa.points[(ka + 1) % 3];
        let a2 = &fa.points[(ka + 2) % 3];
        let sigma = if fb.vectors[kb] == -&fa.vectors[ka] { Sign::Plus } else { Sign::Minus };
        if sigma.apply(&fb.vectors[kb]) != -&fa.vectors[ka] {
            return Err(Error::InvalidArgument("sides do not match".into()));
        }
        let offset = a1 - &sigma.apply(&fb.points[kb]);
        let phi = HalfTranslation { sign: sigma, offset };
        let b2 = phi.apply(&fb.points[(kb + 2) % 3]);
        AdmissiblePolygon::new(s, vec![a0.clone(), b2, a1.clone(), a2.clone()], fa.anchor_poly(s), HalfTranslation::identity())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> Scalar {
        &twice_area(&self.vertices) / &Scalar::int(2)
    }

    /// Interior angle test at vertex `k`: `1` below π, `0` straight, `-1` reflex.
    pub fn turn(&self, k: usize) -> i32 {
        let n = self.vertices.len();
        cross3(&self.vertices[(k + n - 1) % n], &self.vertices[k], &self.vertices[(k + 1) % n]).signum()
    }

    pub fn is_strictly_convex(&self) -> bool {
        (0..self.vertices.len()).all(|k| self.turn(k) > 0)
    }

    /// Corner and plane-to-chart sign of the germ leaving vertex `p` in plane
    /// direction `u`.  The polygon must lie just counterclockwise of `u`
    /// (`ccw_side`) or just clockwise of it.
    pub fn germ(&self, s: &Surface, p: &Vec2, u: &Vec2, ccw_side: bool) -> Option<(usize, Sign)> {
        for cell in &self.cells {
            let pg = s.polygon(cell.poly);
            for k in 0..pg.len() {
                if cell.placement.apply(pg.vertex(k)) != *p {
                    continue;
                }
                let c = s.corner(cell.poly, k);
                let sigma = cell.placement.sign;
                let d = sigma.apply(u);
                if ccw_side {
                    if s.in_sector(c, &d) {
                        return Some((c, sigma));
                    }
                } else {
                    let (u1, u2) = s.sector(c);
                    if u1.cross(&d).is_positive() && (u2.same_ray(&d) || d.cross(&u2).is_positive()) {
                        return Some((c, sigma));
                    }
                }
            }
        }
        None
    }

    fn segment_id(&self, s: &Surface, i: usize, j: usize) -> Result<String> {
        let (p, q) = (&self.vertices[i], &self.vertices[j]);
        let u = q - p;
        let (c, sigma) = self.germ(s, p, &u, true).ok_or_else(|| Error::Internal("no germ at a vertex".into()))?;
        let (c, d) = normalize_corner(s, c, &sigma.apply(&u)).ok_or_else(|| Error::Internal("germ outside its sector".into()))?;
        let sc = sc_from_corner_dir(s, c, &d, None)?;
        if sc.len2 != u.norm2() {
            return Err(Error::Internal("segment meets a marked point".into()));
        }
        Ok(sc.id)
    }

    /// Surface point `(poly, chart point)` under the plane point `z`.
    pub fn surface_point(&self, s: &Surface, z: &Vec2) -> Option<(usize, Vec2)> {
        self.cells.iter().find_map(|cell| {
            let dev = s.developed_vertices(cell.poly, &cell.placement);
            let n = dev.len();
            let inside = (0..n).all(|k| !cross3(&dev[k], &dev[(k + 1) % n], z).is_negative());
            inside.then(|| (cell.poly, cell.placement.invert_point(z)))
        })
    }

    fn with_vertices(&self, s: &Surface, vertices: Vec<Vec2>) -> Result<AdmissiblePolygon> {
        AdmissiblePolygon::new(s, vertices, self.anchor_poly, self.anchor.clone())
    }

    /// The polygon with vertex `k` removed (cut along the diagonal of its neighbours).
    pub fn without_vertex(&self, s: &Surface, k: usize) -> Result<AdmissiblePolygon> {
        let mut v = self.vertices.clone();
        v.remove(k);
        // keep the anchor copy valid by re-anchoring on a cell meeting the rest
        for cell in std::iter::once(&Cell { poly: self.anchor_poly, placement: self.anchor.clone() }).chain(&self.cells) {
            if let Ok(p) = AdmissiblePolygon::new(s, v.clone(), cell.poly, cell.placement.clone()) {
                return Ok(p);
            }
        }
        Err(Error::PreconditionViolated(format!("removing vertex {k} does not leave an admissible polygon")))
    }
}

/// Extends across side `side` (from vertex `side` to the next) by flowing the
/// side in the plane direction `flow`, which must point out of the polygon.
/// The new vertex is the first marked point met; ties go to the end of the
/// side.  With `open` the flow lines through the two ends are ignored.
pub fn extend_strip_with(
    s: &Surface,
    p: &AdmissiblePolygon,
    side: usize,
    flow: &Vec2,
    open: bool,
) -> Result<AdmissiblePolygon> {
    let n = p.len();
    if side >= n {
        return Err(Error::InvalidArgument(format!("no side {side}")));
    }
    let id = &p.side_ids[side];
    if p.side_ids.iter().enumerate().any(|(k, other)| k != side && other == id) {
        return Err(Error::HypothesisViolated(format!("side {side} has the same image as another side")));
    }
    let a = &p.vertices[side];
    let a1 = &p.vertices[(side + 1) % n];
    if !(a1 - a).cross(flow).is_negative() {
        return Err(Error::InvalidArgument("flow must point out of the polygon".into()));
    }
    // transversal from the end of the side back to its start, flowing to its left
    let v = a - a1;
    let (c, sigma) = p.germ(s, a1, &v, false).ok_or_else(|| Error::Internal("no germ for the side".into()))?;
    let hit = first_hit(s, c, &sigma.apply(&v), &sigma.apply(flow), open, None)?;
    let x = &(a1 + &v.scale(&hit.foot)) + &flow.scale(&hit.param);
    let mut vertices = p.vertices.clone();
    vertices.insert(side + 1, x);
    p.with_vertices(s, vertices)
}

/// Extends across `side` flowing perpendicular to it.
pub fn extend_strip(s: &Surface, p: &AdmissiblePolygon, side: usize) -> Result<AdmissiblePolygon> {
    let n = p.len();
    if side >= n {
        return Err(Error::InvalidArgument(format!("no side {side}")));
    }
    let u = &p.vertices[(side + 1) % n] - &p.vertices[side];
    extend_strip_with(s, p, side, &-u.perp(), false)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "case", content = "polygon", rename_all = "snake_case")]
pub enum PentagonOutcome {
    Pentagon(AdmissiblePolygon),
    SimpleCylinderCase(AdmissiblePolygon),
    NonSimpleCylinderCase(AdmissiblePolygon),
}

impl PentagonOutcome {
    pub fn polygon(&self) -> &AdmissiblePolygon {
        match self {
            PentagonOutcome::Pentagon(p) | PentagonOutcome::SimpleCylinderCase(p) | PentagonOutcome::NonSimpleCylinderCase(p) => p,
        }
    }
}

/// Cylinder in the direction of side `i` that contains the triangle, if any.
fn containing_cylinder(s: &Surface, tri: &AdmissiblePolygon, i: usize) -> Result<Option<Cylinder>> {
    let v = &tri.vertices;
    let (a, b, apex) = (&v[i], &v[(i + 1) % 3], &v[(i + 2) % 3]);
    let u = b - a;
    let dec = direction_decomposition(s, &u, None)?;
    let Decomposition::Periodic { cylinders, .. } = &dec else {
        return Err(Error::UnknownCylinderStatus(format!("direction {u}")));
    };
    let dist2 = &u.cross(&(apex - a)).square() / &u.norm2();
    let min_h2 = cylinders.iter().map(|c| c.height2.clone()).min().expect("a cylinder");
    let mid = &(a + b).scale(&Scalar::frac(1, 2));
    let mut eps = Scalar::frac(1, 2);
    while &eps.square() * &dist2 >= min_h2 {
        eps = &eps / &Scalar::int(2);
    }
    let q = mid + &(apex - mid).scale(&eps);
    let (poly, z) = tri.surface_point(s, &q).ok_or_else(|| Error::Internal("point outside the triangle".into()))?;
    let Some(ci) = dec.cylinder_at(poly, &z) else {
        return Ok(None);
    };
    let cyl = &cylinders[ci];
    Ok((dist2 <= cyl.height2).then(|| cyl.clone()))
}

/// Plane vector of the saddle connection leaving vertex `p` of `poly` in plane
/// direction `target`, reached by turning from the germ `from` (ccw or cw).
fn neighbour(s: &Surface, poly: &AdmissiblePolygon, p: &Vec2, from: &Vec2, target: &Vec2, ccw: bool) -> Result<Vec2> {
    let (c, sigma) = poly.germ(s, p, from, true).ok_or_else(|| Error::Internal("no germ".into()))?;
    let d = sigma.apply(target);
    let (c1, d1) = if ccw { locate_ccw(s, c, &d) } else { locate_cw(s, c, &d) };
    let sigma1 = if d1 == d { sigma } else { sigma.times(Sign::Minus) };
    let o = oriented(s, c1, &d1, None).ok_or(Error::NoHitWithinBudget)?;
    Ok(sigma1.apply(&o.direction))
}

/// Extends a triangle to a pentagon according to its position relative to
/// cylinders in the directions of its sides.
pub fn pentagon_of_triangle(s: &Surface, tw: &TriangleWitness) -> Result<PentagonOutcome> {
    let tri = AdmissiblePolygon::from_face(s, &tw.face)?;
    let v = tri.vertices.clone();
    let mut found = Vec::new();
    for i in 0..3 {
        if let Some(c) = containing_cylinder(s, &tri, i)? {
            found.push((i, c));
        }
    }
    if let Some((i, _)) = found.iter().find(|(_, c)| c.is_simple()) {
        let (a, b, apex) = (&v[*i], &v[(i + 1) % 3], &v[(i + 2) % 3]);
        let quad = vec![a.clone(), b.clone(), b + &(apex - a), apex.clone()];
        return Ok(PentagonOutcome::SimpleCylinderCase(tri.with_vertices(s, quad)?));
    }
    if let Some((i, cyl)) = found.first() {
        let (a, b, apex) = (&v[*i], &v[(i + 1) % 3], &v[(i + 2) % 3]);
        let u = b - a;
        let top_next = apex + &neighbour(s, &tri, apex, &(a - apex), &u, true)?;
        let pent = if u.norm2() < cyl.circumference2 {
            let b_next = b + &neighbour(s, &tri, b, &(apex - b), &u, false)?;
            vec![a.clone(), b.clone(), b_next, top_next, apex.clone()]
        } else {
            let top_prev = apex + &neighbour(s, &tri, apex, &(a - apex), &-&u, false)?;
            vec![a.clone(), b.clone(), top_next, apex.clone(), top_prev]
        };
        return Ok(PentagonOutcome::NonSimpleCylinderCase(tri.with_vertices(s, pent)?));
    }
    // not in any cylinder: flow along side 0 from both other sides
    let u = &v[1] - &v[0];
    let quad = extend_strip_with(s, &tri, 2, &-&u, true)?;
    // quad is (v0, v1, v2, a2) with a2 inserted after v2; next extend across v1 -> v2
    let pent = extend_strip_with(s, &quad, 1, &u, true)?;
    Ok(PentagonOutcome::Pentagon(pent))
}

#[derive(Clone, Debug, Serialize)]
pub struct Coconvexified {
    /// Pentagons `(A1, Â(k-1), Âk, A3, A4)` in order.
    pub steps: Vec<AdmissiblePolygon>,
    /// Final quadrilateral, strictly convex at each vertex.
    pub result: AdmissiblePolygon,
    /// Every new vertex is joined to `A3` by a distinct saddle connection of
    /// squared length below this bound.
    pub length_bound2: Scalar,
}

impl Coconvexified {
    /// Step bound: the number of saddle connections below the length bound.
    pub fn cap(&self, s: &Surface) -> usize {
        Catalog::new(s).enumerate(&self.length_bound2).len()
    }
}

/// Steps taken before the enumeration bound is actually computed.
const CHEAP_STEPS: usize = 64;

/// Replaces the second vertex of a quadrilateral that is not strictly convex
/// at `reflex` until the quadrilateral is strictly convex, keeping the
/// triangle on the other three vertices.
pub fn coconvexify(s: &Surface, p: &AdmissiblePolygon, reflex: usize) -> Result<Coconvexified> {
    if p.len() != 4 || reflex >= 4 {
        return Err(Error::PreconditionViolated("expected a quadrilateral and one of its vertices".into()));
    }
    if (0..4).any(|k| k != reflex && p.turn(k) <= 0) {
        return Err(Error::PreconditionViolated("quadrilateral must be strictly convex at the other vertices".into()));
    }
    let rot = |k: usize| p.vertices[(reflex + k) % 4].clone();
    let (a1, a2, a3, a4) = (rot(0), rot(1), rot(2), rot(3));
    let mut cur = p.with_vertices(s, vec![a1.clone(), a2.clone(), a3.clone(), a4.clone()])?;
    if cur.is_strictly_convex() {
        return Ok(Coconvexified { steps: Vec::new(), result: cur, length_bound2: Scalar::zero() });
    }
    // |A3 Âk| < T with T² = 4 area² / (|A1A3|² min(sin²θ0, sin²φ))
    let area = s.total_area();
    let e31 = &a1 - &a3;
    let sin2 = |x: &Vec2, y: &Vec2| &x.cross(y).square() / &(&x.norm2() * &y.norm2());
    let s0 = sin2(&e31, &(&a2 - &a3));
    let s1 = sin2(&e31, &(&a3 - &a4));
    let smin = s0.min(s1);
    let t2 = &(&Scalar::int(4) * &area.square()) / &(&e31.norm2() * &smin);
    let mut cap = None;
    let u = &a3 - &a4;
    let mut steps = Vec::new();
    loop {
        if steps.len() >= CHEAP_STEPS {
            let cap = *cap.get_or_insert_with(|| Catalog::new(s).enumerate(&t2).len());
            if steps.len() > cap {
                return Err(Error::Internal("coconvexification exceeded its step bound".into()));
            }
        }
        // flow out of side Âk -> A3 along the strip direction
        let side_vec = &cur.vertices[2] - &cur.vertices[1];
        let flow = if side_vec.cross(&u).is_negative() { u.clone() } else { -&u };
        let pent = extend_strip_with(s, &cur, 1, &flow, true)?;
        let next = pent.without_vertex(s, 1)?;
        steps.push(pent);
        cur = next;
        if cur.is_strictly_convex() {
            return Ok(Coconvexified { steps, result: cur, length_bound2: t2 });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;

    fn square(k: i64, h: i64) -> Vec<Vec2> {
        vec![Vec2::ints(0, 0), Vec2::ints(k, 0), Vec2::ints(k, h), Vec2::ints(0, h)]
    }

    #[test]
    fn torus_rectangles() {
        let s = builtin("square_torus").unwrap();
        let id = HalfTranslation::identity();
        assert!(is_admissible(&s, &square(1, 1), 0, &id).unwrap().admissible);
        let r = is_admissible(&s, &square(1, 2), 0, &id).unwrap();
        assert!(!r.admissible);
        let tri = vec![Vec2::ints(0, 0), Vec2::ints(2, 0), Vec2::ints(0, 1)];
        let r = is_admissible(&s, &tri, 0, &id).unwrap();
        assert!(r.violations.iter().any(|v| matches!(v, Violation::MarkedOnSide { .. })));
    }

    #[test]
    fn torus_extension() {
        let s = builtin("square_torus").unwrap();
        let tri = vec![Vec2::ints(0, 0), Vec2::ints(1, 0), Vec2::ints(1, 1)];
        let p = AdmissiblePolygon::new(&s, tri, 0, HalfTranslation::identity()).unwrap();
        let q = extend_strip(&s, &p, 2).unwrap();
        assert_eq!(q.vertices[3], Vec2::ints(0, 1));
        assert_eq!(q.side_ids[0], q.side_ids[2]);
        assert!(matches!(extend_strip(&s, &q, 0), Err(Error::HypothesisViolated(_))));
    }

    fn witnesses(s: &Surface) -> Vec<TriangleWitness> {
        let cat = Catalog::new(s);
        let t = crate::triangulation::complete_triangulation(&cat, &[]).unwrap();
        t.faces
            .iter()
            .map(|f| {
                let ids = t.face_ids(f);
                TriangleWitness { sides: [ids[0].to_string(), ids[1].to_string(), ids[2].to_string()], face: f.clone() }
            })
            .collect()
    }

    #[test]
    fn torus_triangle_in_simple_cylinder() {
        let s = builtin("square_torus").unwrap();
        for tw in witnesses(&s) {
            let out = pentagon_of_triangle(&s, &tw).unwrap();
            assert!(matches!(out, PentagonOutcome::SimpleCylinderCase(_)));
        }
    }

    #[test]
    fn octagon_pentagons() {
        let s = builtin("regular_octagon").unwrap();
        for tw in witnesses(&s) {
            let out = pentagon_of_triangle(&s, &tw).unwrap();
            let p = out.polygon();
            if let PentagonOutcome::Pentagon(p) = &out {
                assert!(p.is_strictly_convex());
            }
            assert!(is_admissible(&s, &p.vertices, p.anchor_poly, &p.anchor).unwrap().admissible);
        }
    }

    #[test]
    fn octagon_many_triangles() {
        let s = builtin("regular_octagon").unwrap();
        let cat = Catalog::new(&s);
        let g = crate::graph::build_graph(&cat, &Scalar::int(40));
        let tws = crate::graph::triangles(&cat, &g, 200).unwrap();
        let mut counts = [0; 3];
        for tw in &tws {
            let out = pentagon_of_triangle(&s, tw).unwrap();
            let k = match &out {
                PentagonOutcome::Pentagon(p) => {
                    assert!(p.is_strictly_convex());
                    0
                }
                PentagonOutcome::SimpleCylinderCase(_) => 1,
                PentagonOutcome::NonSimpleCylinderCase(p) => {
                    assert_eq!((0..5).filter(|&k| p.turn(k) == 0).count(), 1);
                    2
                }
            };
            counts[k] += 1;
        }
    }

    #[test]
    fn octagon_coconvex() {
        let s = builtin("regular_octagon").unwrap();
        let cat = Catalog::new(&s);
        let t0 = crate::triangulation::complete_triangulation(&cat, &[]).unwrap();
        let (_, all) = crate::triangulation::flip_bfs(&s, &t0, 2).unwrap();
        let mut tried = 0;
        for t in &all {
            for fa in &t.faces {
                for ka in 0..3 {
                    let (fj, kb) = t.face_of(fa.darts[ka].twin());
                    let Ok(q) = AdmissiblePolygon::from_faces(&s, fa, ka, &t.faces[fj], kb) else { continue };
                    for r in 0..4 {
                        if q.turn(r) <= 0 && (0..4).all(|k| k == r || q.turn(k) > 0) {
                            let out = coconvexify(&s, &q, r).unwrap();
                            assert!(out.result.is_strictly_convex());
                            if tried == 0 {
                                assert!(out.steps.len() <= out.cap(&s));
                            }
                            tried += 1;
                        }
                    }
                }
            }
        }
        assert!(tried > 0);
    }
}
