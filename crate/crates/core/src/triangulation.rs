//! Triangulations by saddle connections, greedy completion and flips.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{orient, HalfTranslation, Sign, Vec2};
use crate::saddle::{canonicalize, intersections, oriented, Catalog, SaddleConnection};
use crate::scalar::Scalar;
use crate::surface::Surface;
use crate::trace::{locate_ccw, normalize_corner};

/// One side of an edge, leaving a marked point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: usize,
    pub rev: bool,
}

impl Dart {
    pub fn twin(self) -> Dart {
        Dart { edge: self.edge, rev: !self.rev }
    }
}

/// A triangular face, developed in the chart of the polygon holding `corners[0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub darts: [Dart; 3],
    /// Corner each dart leaves from.
    pub corners: [usize; 3],
    /// Chart of `corners[i]` to the face frame.
    pub frames: [Sign; 3],
    /// Side vectors in the face frame; they sum to zero and turn left.
    pub vectors: [Vec2; 3],
    /// Vertices in the face frame, `points[i]` at `corners[i]`.
    pub points: [Vec2; 3],
}

impl Face {
    pub fn area(&self) -> Scalar {
        &self.vectors[0].cross(&self.vectors[1]) / &Scalar::int(2)
    }

    /// Polygon of the surface whose chart the face is developed in.
    pub fn anchor_poly(&self, s: &Surface) -> usize {
        s.corner_ref(self.corners[0]).0
    }
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    /// Sorted by id.
    pub edges: Vec<SaddleConnection>,
    pub faces: Vec<Face>,
}

#[derive(Serialize)]
struct TriangulationJson<'a> {
    edges: Vec<&'a str>,
    faces: Vec<[&'a str; 3]>,
}

impl PartialEq for Triangulation {
    fn eq(&self, o: &Self) -> bool {
        self.key() == o.key()
    }
}

/// Expected number of edges, `6g − 6 + 3p`.
pub fn edge_count(s: &Surface) -> usize {
    (6 * s.genus() as i64 - 6 + 3 * s.classes().len() as i64) as usize
}

/// Dart leaving direction in the chart of its (normalized) corner.
fn dart_germ(s: &Surface, sc: &SaddleConnection, rev: bool) -> (usize, Vec2) {
    if rev {
        normalize_corner(s, sc.end, &sc.end_direction).expect("end direction in sector")
    } else {
        (sc.start, sc.direction.clone())
    }
}

struct Rotation {
    germs: BTreeMap<Dart, (usize, Vec2)>,
    /// Position of each dart in the counterclockwise order of its marked point.
    index: BTreeMap<Dart, (usize, usize)>,
    cycles: Vec<Vec<Dart>>,
}

fn rotation(s: &Surface, edges: &[SaddleConnection]) -> Rotation {
    let mut germs = BTreeMap::new();
    let mut per_class: Vec<Vec<Dart>> = vec![Vec::new(); s.classes().len()];
    for (i, sc) in edges.iter().enumerate() {
        for rev in [false, true] {
            let d = Dart { edge: i, rev };
            let g = dart_germ(s, sc, rev);
            per_class[s.class_of(g.0)].push(d);
            germs.insert(d, g);
        }
    }
    for list in per_class.iter_mut() {
        list.sort_by(|a, b| {
            let (ca, ua) = &germs[a];
            let (cb, ub) = &germs[b];
            s.walk_pos(*ca).cmp(&s.walk_pos(*cb)).then_with(|| 0.cmp(&ua.cross(ub).signum()))
        });
    }
    let mut index = BTreeMap::new();
    for (ci, list) in per_class.iter().enumerate() {
        for (k, d) in list.iter().enumerate() {
            index.insert(*d, (ci, k));
        }
    }
    Rotation { germs, index, cycles: per_class }
}

impl Rotation {
    fn prev_ccw(&self, d: Dart) -> (Dart, bool) {
        let (ci, k) = self.index[&d];
        let list = &self.cycles[ci];
        if k == 0 {
            (list[list.len() - 1], true)
        } else {
            (list[k - 1], false)
        }
    }
}

/// Computes the faces of a set of edges that is expected to triangulate.
pub fn build_faces(s: &Surface, edges: &[SaddleConnection]) -> Result<Vec<Face>> {
    let rot = rotation(s, edges);
    let mut used: BTreeSet<Dart> = BTreeSet::new();
    let mut faces = Vec::new();
    for &d0 in rot.germs.keys() {
        if used.contains(&d0) {
            continue;
        }
        let mut darts = vec![d0];
        let mut corners = vec![rot.germs[&d0].0];
        let mut frames = vec![Sign::Plus];
        let mut d = d0;
        let mut f = Sign::Plus;
        loop {
            let tw = d.twin();
            let f_tw = f.times(edges[d.edge].twist);
            let (nd, wrap) = rot.prev_ccw(tw);
            let rho = s.walk_frame(rot.germs[&nd].0, rot.germs[&tw].0, wrap);
            f = f_tw.times(rho);
            d = nd;
            if d == d0 {
                if f != Sign::Plus {
                    return Err(Error::Internal("face frame does not close".into()));
                }
                break;
            }
            if darts.len() >= 3 {
                return Err(Error::Internal("face with more than three sides".into()));
            }
            darts.push(d);
            corners.push(rot.germs[&d].0);
            frames.push(f);
        }
        if darts.len() != 3 {
            return Err(Error::Internal(format!("face with {} sides", darts.len())));
        }
        for d in &darts {
            used.insert(*d);
        }
        let vectors: Vec<Vec2> = (0..3).map(|i| frames[i].apply(&rot.germs[&darts[i]].1)).collect();
        let sum = &(&vectors[0] + &vectors[1]) + &vectors[2];
        if !sum.is_zero() || !vectors[0].cross(&vectors[1]).is_positive() {
            return Err(Error::Internal("face does not close to a positive triangle".into()));
        }
        let p0 = s.corner_point(corners[0]).clone();
        let p1 = &p0 + &vectors[0];
        let p2 = &p1 + &vectors[1];
        faces.push(Face {
            darts: [darts[0], darts[1], darts[2]],
            corners: [corners[0], corners[1], corners[2]],
            frames: [frames[0], frames[1], frames[2]],
            vectors: [vectors[0].clone(), vectors[1].clone(), vectors[2].clone()],
            points: [p0, p1, p2],
        });
    }
    Ok(faces)
}

impl Triangulation {
    /// Builds a triangulation from a full set of pairwise disjoint edges.
    pub fn new(s: &Surface, mut edges: Vec<SaddleConnection>) -> Result<Triangulation> {
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        edges.dedup_by(|a, b| a.id == b.id);
        if edges.len() != edge_count(s) {
            return Err(Error::Internal(format!("{} edges, expected {}", edges.len(), edge_count(s))));
        }
        let faces = build_faces(s, &edges)?;
        let t = Triangulation { edges, faces };
        t.check(s)?;
        Ok(t)
    }

    fn check(&self, s: &Surface) -> Result<()> {
        let expected_faces = 4 * s.genus() as i64 - 4 + 2 * s.classes().len() as i64;
        if self.faces.len() as i64 != expected_faces {
            return Err(Error::Internal(format!("{} faces, expected {expected_faces}", self.faces.len())));
        }
        let mut area = Scalar::zero();
        for f in &self.faces {
            area += &f.area();
        }
        if area != s.total_area() {
            return Err(Error::Internal("faces do not tile the surface".into()));
        }
        Ok(())
    }

    pub fn key(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.id.clone()).collect()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok()
    }

    pub fn face_ids(&self, f: &Face) -> [&str; 3] {
        [
            self.edges[f.darts[0].edge].id.as_str(),
            self.edges[f.darts[1].edge].id.as_str(),
            self.edges[f.darts[2].edge].id.as_str(),
        ]
    }

    /// Face that has `d` as a side, with the side index.
    pub fn face_of(&self, d: Dart) -> (usize, usize) {
        for (fi, f) in self.faces.iter().enumerate() {
            for (k, fd) in f.darts.iter().enumerate() {
                if *fd == d {
                    return (fi, k);
                }
            }
        }
        panic!("dart without face");
    }

    pub fn to_json(&self) -> String {
        let j = TriangulationJson {
            edges: self.edges.iter().map(|e| e.id.as_str()).collect(),
            faces: self.faces.iter().map(|f| self.face_ids(f)).collect(),
        };
        serde_json::to_string(&j).expect("triangulation serializes")
    }
}

/// Extends a pairwise disjoint seed greedily, shortest connections first.
pub fn complete_triangulation(cat: &Catalog, seed: &[SaddleConnection]) -> Result<Triangulation> {
    let s = cat.surface;
    for (i, a) in seed.iter().enumerate() {
        for b in &seed[i + 1..] {
            if intersections(s, a, b) > 0 {
                return Err(Error::SeedNotDisjoint);
            }
        }
    }
    let target = edge_count(s);
    let mut current: Vec<SaddleConnection> = Vec::new();
    let mut ids: BTreeSet<String> = BTreeSet::new();
    for sc in seed {
        if ids.insert(sc.id.clone()) {
            current.push(sc.clone());
        }
    }
    let mut l2 = seed.iter().map(|sc| sc.len2.clone()).max().unwrap_or_else(Scalar::zero);
    for p in s.polygons() {
        for e in 0..p.len() {
            let n = p.edge_vec(e).norm2();
            if n > l2 {
                l2 = n;
            }
        }
    }
    for _ in 0..40 {
        if current.len() >= target {
            break;
        }
        for sc in cat.enumerate(&l2) {
            if current.len() >= target {
                break;
            }
            if ids.contains(&sc.id) {
                continue;
            }
            if current.iter().all(|c| intersections(s, c, &sc) == 0) {
                ids.insert(sc.id.clone());
                current.push(sc);
            }
        }
        l2 = &l2 * &Scalar::int(2);
    }
    if current.len() != target {
        return Err(Error::Internal("greedy completion did not reach a triangulation".into()));
    }
    Triangulation::new(s, current)
}

#[derive(Clone, Debug)]
pub enum FlipOutcome {
    Flipped { triangulation: Triangulation, new_edge: String },
    NotFlippable { reason: String },
}

/// Replaces `edge_id` by the other diagonal of its quadrilateral when that
/// quadrilateral is strictly convex.
pub fn flip(s: &Surface, t: &Triangulation, edge_id: &str) -> Result<FlipOutcome> {
    let e = t.edge_index(edge_id).ok_or_else(|| Error::UnknownEdge(edge_id.to_string()))?;
    let d = Dart { edge: e, rev: false };
    let (f1, k1) = t.face_of(d);
    let (f2, k2) = t.face_of(d.twin());
    if f1 == f2 {
        return Ok(FlipOutcome::NotFlippable { reason: "both sides of the edge lie in the same face".into() });
    }
    let a = &t.faces[f1];
    let b = &t.faces[f2];
    let v0 = a.points[k1].clone();
    let v1 = a.points[(k1 + 1) % 3].clone();
    let x = a.points[(k1 + 2) % 3].clone();
    // chart change from the frame of `b` to the frame of `a`
    let ub = &b.vectors[k2];
    let kappa = if (-ub) == a.vectors[k1] { Sign::Plus } else { Sign::Minus };
    debug_assert_eq!(kappa.apply(ub), -&a.vectors[k1]);
    let phi = HalfTranslation { sign: kappa, offset: &v1 - &kappa.apply(&b.points[k2]) };
    let y = phi.apply(&b.points[(k2 + 2) % 3]);
    let quad = [&v0, &y, &v1, &x];
    let convex = (0..4).all(|i| orient(quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]) > 0);
    if !convex {
        return Ok(FlipOutcome::NotFlippable { reason: "quadrilateral is not strictly convex".into() });
    }
    let kx = (k1 + 2) % 3;
    let cx = a.corners[kx];
    let local = a.frames[kx].apply(&(&y - &x));
    let (c, dir) = locate_ccw(s, cx, &local);
    let o = oriented(s, c, &dir, None).ok_or(Error::NoHitWithinBudget)?;
    if o.direction.norm2() != (&y - &x).norm2() {
        return Err(Error::Internal("new diagonal meets a marked point early".into()));
    }
    let sc = canonicalize(s, o);
    let new_edge = sc.id.clone();
    let mut edges: Vec<SaddleConnection> = t.edges.iter().filter(|x| x.id != edge_id).cloned().collect();
    edges.push(sc);
    let triangulation = Triangulation::new(s, edges)?;
    Ok(FlipOutcome::Flipped { triangulation, new_edge })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FlipGraph {
    /// Sorted edge-id sets.
    pub nodes: Vec<Vec<String>>,
    pub depth: Vec<usize>,
    /// `(from, to, flipped edge)`.
    pub edges: Vec<(usize, usize, String)>,
    /// `(node, edge)` pairs that could not be flipped.
    pub not_flippable: Vec<(usize, String)>,
}

/// Breadth-first exploration of flips up to `depth`.
pub fn flip_bfs(s: &Surface, t0: &Triangulation, depth: usize) -> Result<(FlipGraph, Vec<Triangulation>)> {
    let mut g = FlipGraph::default();
    let mut tris = vec![t0.clone()];
    let mut index: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    index.insert(t0.key(), 0);
    g.nodes.push(t0.key());
    g.depth.push(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if g.depth[i] >= depth {
            continue;
        }
        let t = tris[i].clone();
        for id in t.key() {
            match flip(s, &t, &id)? {
                FlipOutcome::NotFlippable { .. } => g.not_flippable.push((i, id)),
                FlipOutcome::Flipped { triangulation, .. } => {
                    let k = triangulation.key();
                    let j = match index.get(&k) {
                        Some(&j) => j,
                        None => {
                            let j = tris.len();
                            index.insert(k.clone(), j);
                            g.nodes.push(k);
                            g.depth.push(g.depth[i] + 1);
                            tris.push(triangulation);
                            queue.push_back(j);
                            j
                        }
                    };
                    g.edges.push((i, j, id));
                }
            }
        }
    }
    Ok((g, tris))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;

    fn hols(t: &Triangulation) -> Vec<Vec2> {
        let mut v: Vec<Vec2> = t.edges.iter().map(|e| e.holonomy.clone()).collect();
        v.sort_by_key(|h| h.key());
        v
    }

    fn set(xs: &[(i64, i64)]) -> Vec<Vec2> {
        let mut v: Vec<Vec2> = xs.iter().map(|&(x, y)| Vec2::ints(x, y).canonical()).collect();
        v.sort_by_key(|h| h.key());
        v
    }

    #[test]
    fn torus_completion_and_flips() {
        let s = builtin("square_torus").unwrap();
        let cat = Catalog::new(&s);
        let t = complete_triangulation(&cat, &[]).unwrap();
        assert_eq!(hols(&t), set(&[(1, 0), (0, 1), (1, 1)]));
        assert_eq!(t.faces.len(), 2);
        let diag = t.edges.iter().find(|e| e.holonomy == Vec2::ints(1, 1)).unwrap().id.clone();
        let FlipOutcome::Flipped { triangulation: t2, new_edge } = flip(&s, &t, &diag).unwrap() else { panic!() };
        assert_eq!(hols(&t2), set(&[(1, 0), (0, 1), (1, -1)]));
        let FlipOutcome::Flipped { triangulation: t3, .. } = flip(&s, &t2, &new_edge).unwrap() else { panic!() };
        assert_eq!(t3, t);
        let h = t.edges.iter().find(|e| e.holonomy == Vec2::ints(1, 0)).unwrap().id.clone();
        let FlipOutcome::Flipped { triangulation: t4, .. } = flip(&s, &t, &h).unwrap() else { panic!() };
        assert_eq!(hols(&t4), set(&[(0, 1), (1, 1), (1, 2)]));
    }

    #[test]
    fn octagon_completion() {
        let s = builtin("regular_octagon").unwrap();
        let t = complete_triangulation(&Catalog::new(&s), &[]).unwrap();
        assert_eq!((t.edges.len(), t.faces.len()), (9, 6));
    }

    #[test]
    fn l_shape_completion() {
        let s = builtin("L_shape_2x1").unwrap();
        let t = complete_triangulation(&Catalog::new(&s), &[]).unwrap();
        assert_eq!((t.edges.len(), t.faces.len()), (9, 6));
    }
}
