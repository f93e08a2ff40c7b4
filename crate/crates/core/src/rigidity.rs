//! Affine maps acting on saddle connection graphs: induced isomorphisms,
//! derivative extraction, triangle checks, quotient orbits and the wedge
//! invariant.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Mat2, Sign, Vec2};
use crate::graph::{bounds_triangle, graph_on, triangles, ScGraph, TriangleWitness};
use crate::saddle::{intersections, oriented, sc_from_corner_dir, Catalog, SaddleConnection};
use crate::scalar::Scalar;
use crate::surface::{EdgeRef, Surface};
use crate::trace::{locate_ccw, locate_cw, normalize_corner};

/// Image of one corner under a cut-and-paste isometry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CornerImage {
    pub corner: usize,
    /// Corner of the target whose sector contains `sign * u1`.
    pub image: usize,
    pub sign: i32,
}

/// A half-translation equivalence between two presentations, recorded by
/// where it sends the outgoing edge direction of every corner.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    germs: Vec<(usize, Sign)>,
}

fn sign_between(u: &Vec2, w: &Vec2) -> Option<Sign> {
    if u == w {
        Some(Sign::Plus)
    } else if *u == -w {
        Some(Sign::Minus)
    } else {
        None
    }
}

impl Isometry {
    pub fn corner_map(&self) -> Vec<CornerImage> {
        self.germs
            .iter()
            .enumerate()
            .map(|(corner, (image, sign))| CornerImage { corner, image: *image, sign: sign.to_i32() })
            .collect()
    }

    /// Image on `to` of a connection of the source presentation.
    pub fn map_sc(&self, to: &Surface, sc: &SaddleConnection) -> Result<SaddleConnection> {
        let (c, eps) = &self.germs[sc.start];
        let d = eps.apply(&sc.direction);
        let (c2, d2) = locate_ccw(to, *c, &d);
        let out = sc_from_corner_dir(to, c2, &d2, None)?;
        if out.len2 != sc.len2 {
            return Err(Error::Internal(format!("isometry changed the length of {}", sc.id)));
        }
        Ok(out)
    }
}

/// Germ at the far end of the polygon edge leaving corner `c`, if the edge maps
/// to a connection of the same length.
fn edge_end(a: &Surface, b: &Surface, c: usize, germ: &(usize, Sign)) -> Option<(usize, Vec2)> {
    let (u1, _) = a.sector(c);
    let d = germ.1.apply(&u1);
    let o = oriented(b, germ.0, &d, Some(4 * b.num_corners() + 8))?;
    if o.direction != d {
        return None;
    }
    normalize_corner(b, o.end, &o.end_direction)
}

fn propagate(a: &Surface, b: &Surface, start: (usize, Sign)) -> Option<Isometry> {
    let n = a.num_corners();
    let mut germs: Vec<Option<(usize, Sign)>> = vec![None; n];
    germs[0] = Some(start);
    let mut queue = VecDeque::from([0]);
    let set = |germs: &mut Vec<Option<(usize, Sign)>>, queue: &mut VecDeque<usize>, c: usize, g: (usize, Sign)| {
        match germs[c] {
            Some(old) => old == g,
            None => {
                germs[c] = Some(g);
                queue.push_back(c);
                true
            }
        }
    };
    while let Some(c) = queue.pop_front() {
        let g = germs[c].unwrap();
        let (e, w) = edge_end(a, b, c, &g)?;
        let (p, k) = a.corner_ref(c);
        let m = a.polygon(p).len();
        // The partner edge leaves the marked point where this edge ends.
        let (f, _) = a.partner(EdgeRef::new(p, k));
        let qc = a.corner(f.poly, f.edge);
        let eq = sign_between(&a.edge_vec(f), &w)?;
        if !set(&mut germs, &mut queue, qc, (e, eq)) {
            return None;
        }
        // The next corner of the same polygon, reached by turning clockwise
        // from the incoming edge.
        let nc = a.corner(p, (k + 1) % m);
        let (u1n, u2n) = a.sector(nc);
        let sigma = sign_between(&u2n, &w)?;
        let (e2, d2) = locate_cw(b, e, &sigma.apply(&u1n));
        let s2 = sign_between(&u1n, &d2)?;
        if !set(&mut germs, &mut queue, nc, (e2, s2)) {
            return None;
        }
    }
    let germs: Vec<(usize, Sign)> = germs.into_iter().collect::<Option<_>>()?;
    let mut class_map: BTreeMap<usize, usize> = BTreeMap::new();
    for (c, (img, _)) in germs.iter().enumerate() {
        let ca = a.class_of(c);
        let cb = b.class_of(*img);
        if *class_map.entry(ca).or_insert(cb) != cb {
            return None;
        }
        if a.classes()[ca].angle_pi != b.classes()[cb].angle_pi {
            return None;
        }
    }
    let images: BTreeSet<usize> = class_map.values().copied().collect();
    if images.len() != a.classes().len() || images.len() != b.classes().len() {
        return None;
    }
    Some(Isometry { germs })
}

/// All half-translation equivalences from `a` to `b` preserving marked points.
pub fn isometries(a: &Surface, b: &Surface) -> Vec<Isometry> {
    if a.field_d() != b.field_d() && a.field_d() != 0 && b.field_d() != 0 {
        return Vec::new();
    }
    if a.total_area() != b.total_area() || a.classes().len() != b.classes().len() || a.num_corners() == 0 {
        return Vec::new();
    }
    let (u1, _) = a.sector(0);
    let mut out = Vec::new();
    for c in 0..b.num_corners() {
        for eps in [Sign::Plus, Sign::Minus] {
            if !b.in_sector(c, &eps.apply(&u1)) {
                continue;
            }
            if let Some(iso) = propagate(a, b, (c, eps)) {
                if !out.contains(&iso) {
                    out.push(iso);
                }
            }
        }
    }
    out
}

/// Image on `apply_matrix(s, a)` of a connection of `s`.
pub fn transport(s: &Surface, t: &Surface, a: &Mat2, sc: &SaddleConnection) -> Result<SaddleConnection> {
    let c = s.corner_after_matrix(sc.start, a.det().is_negative());
    sc_from_corner_dir(t, c, &a.apply(&sc.direction), None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Target is the image surface `A · s`.
    Affine { matrix: Mat2 },
    /// Target is `s` itself, reached through a cut-and-paste isometry of `A · s`.
    Automorphism { matrix: Mat2, surface_map: Vec<CornerImage> },
    Supplied,
}

/// Outcome of checking that a vertex map preserves adjacency both ways.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IsoReport {
    pub injective: bool,
    pub adjacency_preserved: bool,
    /// Source pairs whose adjacency differs from that of their images.
    pub mismatches: Vec<(String, String)>,
}

impl IsoReport {
    pub fn is_valid(&self) -> bool {
        self.injective && self.adjacency_preserved
    }
}

#[derive(Clone, Debug)]
pub struct GraphIso {
    pub source_surface: Surface,
    pub target_surface: Surface,
    pub source: ScGraph,
    pub target: ScGraph,
    /// Source vertex index to target vertex index.
    pub vertex_map: Vec<usize>,
    pub provenance: Provenance,
    pub report: IsoReport,
}

#[derive(Serialize)]
struct IsoJson<'a> {
    provenance: &'a Provenance,
    source_l2: &'a Scalar,
    target_l2: &'a Scalar,
    vertices: usize,
    map: BTreeMap<&'a str, &'a str>,
    report: &'a IsoReport,
}

fn validate(source: &ScGraph, target: &ScGraph, map: &[usize]) -> IsoReport {
    let injective = map.iter().collect::<BTreeSet<_>>().len() == map.len();
    let mut mismatches = Vec::new();
    for i in 0..map.len() {
        for j in i + 1..map.len() {
            if source.has_edge(i, j) != (map[i] != map[j] && target.has_edge(map[i], map[j])) {
                mismatches.push((source.vertices[i].id.clone(), source.vertices[j].id.clone()));
            }
        }
    }
    IsoReport { injective, adjacency_preserved: mismatches.is_empty(), mismatches }
}

fn image_graph(t: &Surface, images: &[SaddleConnection]) -> (ScGraph, Vec<usize>) {
    let mut uniq: Vec<SaddleConnection> = Vec::new();
    let mut seen = BTreeSet::new();
    for sc in images {
        if seen.insert(sc.id.clone()) {
            uniq.push(sc.clone());
        }
    }
    uniq.sort_by(|a, b| a.canonical_cmp(b));
    let l2 = images.iter().map(|sc| sc.len2.clone()).max().unwrap_or_else(Scalar::zero);
    let g = graph_on(t, l2, uniq);
    let map = images.iter().map(|sc| g.index[&sc.id]).collect();
    (g, map)
}

impl GraphIso {
    fn assemble(
        source_surface: &Surface,
        target_surface: Surface,
        source: ScGraph,
        images: &[SaddleConnection],
        provenance: Provenance,
    ) -> GraphIso {
        let (target, vertex_map) = image_graph(&target_surface, images);
        let report = validate(&source, &target, &vertex_map);
        GraphIso {
            source_surface: source_surface.clone(),
            target_surface,
            source,
            target,
            vertex_map,
            provenance,
            report,
        }
    }

    /// A user-supplied map between two truncations, keyed by connection id.
    pub fn from_map(
        source_surface: &Surface,
        source: ScGraph,
        target_surface: &Surface,
        target: ScGraph,
        map: &BTreeMap<String, String>,
    ) -> Result<GraphIso> {
        let mut vertex_map = Vec::with_capacity(source.num_vertices());
        for v in &source.vertices {
            let img = map.get(&v.id).ok_or_else(|| Error::UnknownVertex(v.id.clone()))?;
            vertex_map.push(target.vertex(img)?);
        }
        let mut report = validate(&source, &target, &vertex_map);
        if map.len() != source.num_vertices() || source.num_vertices() != target.num_vertices() {
            report.injective = false;
        }
        Ok(GraphIso {
            source_surface: source_surface.clone(),
            target_surface: target_surface.clone(),
            source,
            target,
            vertex_map,
            provenance: Provenance::Supplied,
            report,
        })
    }

    pub fn image(&self, i: usize) -> &SaddleConnection {
        &self.target.vertices[self.vertex_map[i]]
    }

    /// Map by id.
    pub fn id_map(&self) -> BTreeMap<&str, &str> {
        (0..self.vertex_map.len()).map(|i| (self.source.vertices[i].id.as_str(), self.image(i).id.as_str())).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&IsoJson {
            provenance: &self.provenance,
            source_l2: &self.source.l2,
            target_l2: &self.target.l2,
            vertices: self.vertex_map.len(),
            map: self.id_map(),
            report: &self.report,
        })
        .expect("serializable")
    }
}

/// The isomorphism from the truncation of `s` at `l2` to the graph of
/// `A · s` induced by the linear action.
pub fn induced_vertex_map(s: &Surface, a: &Mat2, l2: &Scalar) -> Result<GraphIso> {
    let t = s.apply_matrix(a)?;
    let source = crate::graph::build_graph(&Catalog::new(s), l2);
    let images = source.vertices.iter().map(|sc| transport(s, &t, a, sc)).collect::<Result<Vec<_>>>()?;
    Ok(GraphIso::assemble(s, t, source, &images, Provenance::Affine { matrix: a.clone() }))
}

fn automorphism_iso(s: &Surface, source: &ScGraph, a: &Mat2, t: &Surface, phi: &Isometry) -> Result<GraphIso> {
    let mut images = Vec::with_capacity(source.num_vertices());
    for sc in &source.vertices {
        images.push(phi.map_sc(s, &transport(s, t, a, sc)?)?);
    }
    let provenance = Provenance::Automorphism { matrix: a.clone(), surface_map: phi.corner_map() };
    Ok(GraphIso::assemble(s, s.clone(), source.clone(), &images, provenance))
}

/// Automorphisms of the truncation induced by `A`, one per isometry between
/// `A · s` and `s`; empty when `A` is not the derivative of an affine
/// automorphism.
pub fn induced_automorphisms(s: &Surface, a: &Mat2, l2: &Scalar) -> Result<Vec<GraphIso>> {
    let t = s.apply_matrix(a)?;
    let source = crate::graph::build_graph(&Catalog::new(s), l2);
    isometries(&t, s).iter().map(|phi| automorphism_iso(s, &source, a, &t, phi)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleFailure {
    pub source: [String; 3],
    pub image: [String; 3],
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub checked: usize,
    pub failures: Vec<TriangleFailure>,
}

impl TriangleReport {
    pub fn preserved(&self) -> bool {
        self.failures.is_empty()
    }
}

fn image_ids(iso: &GraphIso, w: &TriangleWitness) -> [usize; 3] {
    w.sides.clone().map(|id| iso.vertex_map[iso.source.index[&id]])
}

/// Checks that every source triangle (up to `budget`) maps to three
/// connections bounding a triangle of the target.
pub fn check_triangle_preserving(iso: &GraphIso, budget: usize) -> Result<TriangleReport> {
    let scat = Catalog::new(&iso.source_surface);
    let tcat = Catalog::new(&iso.target_surface);
    let ws = triangles(&scat, &iso.source, budget)?;
    let mut failures = Vec::new();
    for w in &ws {
        let idx = image_ids(iso, w);
        let image = idx.map(|j| iso.target.vertices[j].id.clone());
        let [a, b, c] = idx.map(|j| &iso.target.vertices[j]);
        let reason = match bounds_triangle(&tcat, a, b, c) {
            Ok(found) if !found.is_empty() => continue,
            Ok(_) => "image connections bound no triangle".to_string(),
            Err(e) => e.to_string(),
        };
        failures.push(TriangleFailure { source: w.sides.clone(), image, reason });
    }
    Ok(TriangleReport { checked: ws.len(), failures })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Derivative {
    Consistent { matrix: Mat2, orientation_preserving: bool, triangles: usize },
    Inconsistent { first: [String; 3], second: [String; 3], reason: String },
}

impl Derivative {
    pub fn matrix(&self) -> Option<&Mat2> {
        match self {
            Derivative::Consistent { matrix, .. } => Some(matrix),
            Derivative::Inconsistent { .. } => None,
        }
    }
}

/// Representative of `±m` whose first nonzero entry is positive.
pub fn sign_normalized(m: &Mat2) -> Mat2 {
    let first = [&m.a, &m.b, &m.c, &m.d].into_iter().find(|x| !x.is_zero());
    match first {
        Some(x) if x.is_negative() => m.neg(),
        _ => m.clone(),
    }
}

/// Linear map sending the sides of `v` to the holonomies `h` with signs
/// making the image close up.
fn solve_triangle(v: &[Vec2; 3], h: [&Vec2; 3]) -> Option<Mat2> {
    let mv = Mat2::from_cols(&v[0], &v[1]).inverse().ok()?;
    for e2 in [Sign::Plus, Sign::Minus] {
        let h2 = e2.apply(h[1]);
        let sum = h[0] + &h2;
        if sum == *h[2] || sum == -h[2] {
            return Some(Mat2::from_cols(h[0], &h2).mul(&mv));
        }
    }
    None
}

/// Extracts the common derivative of the triangle-wise affine pieces of `iso`.
pub fn derivative_of_iso(iso: &GraphIso, max_triangles: usize) -> Result<Derivative> {
    let cat = Catalog::new(&iso.source_surface);
    let ws = triangles(&cat, &iso.source, max_triangles)?;
    if ws.is_empty() {
        return Err(Error::NoTriangleInTruncation);
    }
    let mut first: Option<(Mat2, &TriangleWitness)> = None;
    for w in &ws {
        let idx = image_ids(iso, w);
        let h = idx.map(|j| &iso.target.vertices[j].holonomy);
        let Some(m) = solve_triangle(w.vectors(), h) else {
            return Ok(Derivative::Inconsistent {
                first: w.sides.clone(),
                second: idx.map(|j| iso.target.vertices[j].id.clone()),
                reason: "image holonomies do not close up".into(),
            });
        };
        match &first {
            None => first = Some((m, w)),
            Some((m0, w0)) => {
                if m0.det().signum() != m.det().signum() {
                    return Ok(Derivative::Inconsistent {
                        first: w0.sides.clone(),
                        second: w.sides.clone(),
                        reason: "orientation differs between triangles".into(),
                    });
                }
                if !m0.eq_up_to_sign(&m) {
                    return Ok(Derivative::Inconsistent {
                        first: w0.sides.clone(),
                        second: w.sides.clone(),
                        reason: format!("derivatives {m0} and {m} differ"),
                    });
                }
            }
        }
    }
    let m = sign_normalized(&first.unwrap().0);
    Ok(Derivative::Consistent { orientation_preserving: m.det().is_positive(), matrix: m, triangles: ws.len() })
}

/// `|hol(a) ∧ hol(b)|` for disjoint connections.
pub fn edge_wedge(s: &Surface, a: &SaddleConnection, b: &SaddleConnection) -> Result<Scalar> {
    if a.id == b.id || intersections(s, a, b) > 0 {
        return Err(Error::NotAnEdge(format!("{} {}", a.id, b.id)));
    }
    Ok(a.holonomy.cross(&b.holonomy).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    /// Every class found is the trace of a full orbit on the truncation.
    Certified,
    /// Classes might still merge through images outside the ambient bound.
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientReport {
    pub vertex_orbit_count: usize,
    pub vertex_exactness: Exactness,
    pub edge_orbit_count: usize,
    pub edge_exactness: Exactness,
    /// Wedge value of each truncation edge, as a histogram keyed by value.
    pub wedge_values: BTreeMap<String, usize>,
    /// Whether each edge class carries a single wedge value.
    pub wedge_consistent: bool,
    pub ambient_bound: Scalar,
    /// Number of maps (generator lifts and their inverses) applied.
    pub lifts: usize,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn add(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let n = self.parent[y];
            self.parent[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

struct Lift<'a> {
    matrix: Mat2,
    image: Surface,
    phi: Isometry,
    s: &'a Surface,
}

impl Lift<'_> {
    /// Image inside the ambient catalog, `None` when it is longer than `bound`.
    fn apply(&self, sc: &SaddleConnection, bound: &Scalar) -> Result<Option<SaddleConnection>> {
        if self.matrix.apply(&sc.direction).norm2() > *bound {
            return Ok(None);
        }
        let t = transport(self.s, &self.image, &self.matrix, sc)?;
        Ok(Some(self.phi.map_sc(self.s, &t)?))
    }
}

fn lifts<'a>(s: &'a Surface, generators: &[Mat2]) -> Result<Vec<Lift<'a>>> {
    let one = Scalar::one();
    // Isometries with derivative ±Id belong to every preimage group.
    let mut out: Vec<Lift> =
        isometries(s, s).into_iter().map(|phi| Lift { matrix: Mat2::identity(), image: s.clone(), phi, s }).collect();
    for a in generators {
        if !a.in_field(s.field_d()) {
            return Err(Error::BadGenerator(format!("{a} has entries outside the field")));
        }
        if a.det().abs() != one {
            return Err(Error::BadGenerator(format!("{a} has |det| != 1")));
        }
        for m in [a.clone(), a.inverse()?] {
            let image = s.apply_matrix(&m)?;
            let phis = isometries(&image, s);
            if phis.is_empty() {
                return Err(Error::BadGenerator(format!("{m} is not the derivative of an affine automorphism")));
            }
            for phi in phis {
                out.push(Lift { matrix: m.clone(), image: image.clone(), phi, s });
            }
        }
    }
    Ok(out)
}

/// Orbits of truncation vertices and edges under the affine automorphisms
/// whose derivatives lie in the group generated by `generators`, explored inside the truncation at `ambient_factor * g.l2`.
pub fn orbits(s: &Surface, g: &ScGraph, generators: &[Mat2], ambient_factor: &Scalar) -> Result<QuotientReport> {
    let ls = lifts(s, generators)?;
    let bound = &g.l2 * ambient_factor;
    let ambient = Catalog::new(s).enumerate(&bound);
    let amb_index: HashMap<String, usize> = ambient.iter().enumerate().map(|(i, sc)| (sc.id.clone(), i)).collect();
    let mut memo: HashMap<(usize, usize), Option<usize>> = HashMap::new();
    let mut image = |l: usize, i: usize| -> Result<Option<usize>> {
        if let Some(r) = memo.get(&(l, i)) {
            return Ok(*r);
        }
        let r = ls[l].apply(&ambient[i], &bound)?.map(|sc| amb_index[&sc.id]);
        memo.insert((l, i), r);
        Ok(r)
    };
    let start: Vec<usize> = g.vertices.iter().map(|v| amb_index[&v.id]).collect();

    // Vertex classes.
    let mut dsu = Dsu { parent: (0..ambient.len()).collect() };
    let mut leaky = vec![false; ambient.len()];
    let mut seen = vec![false; ambient.len()];
    let mut queue: VecDeque<usize> = start.iter().copied().collect();
    for &i in &start {
        seen[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for l in 0..ls.len() {
            match image(l, i)? {
                Some(j) => {
                    dsu.union(i, j);
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
                None => leaky[i] = true,
            }
        }
    }
    let mut vclasses: BTreeMap<usize, bool> = BTreeMap::new();
    for i in 0..ambient.len() {
        if seen[i] {
            let r = dsu.find(i);
            *vclasses.entry(r).or_insert(false) |= leaky[i];
        }
    }
    let vroots: BTreeSet<usize> = start.iter().map(|&i| dsu.find(i)).collect();
    let vertex_orbit_count = vroots.len();
    let vertex_exactness = exactness(vroots.iter().filter(|r| vclasses[r]).count());

    // Edge classes, as unordered pairs of ambient vertices.
    let mut edsu = Dsu { parent: Vec::new() };
    let mut eid: HashMap<(usize, usize), usize> = HashMap::new();
    let mut eleaky: Vec<bool> = Vec::new();
    let mut equeue = VecDeque::new();
    let mut intern = |p: (usize, usize), edsu: &mut Dsu, eleaky: &mut Vec<bool>, q: &mut VecDeque<(usize, usize)>| {
        let p = (p.0.min(p.1), p.0.max(p.1));
        *eid.entry(p).or_insert_with(|| {
            eleaky.push(false);
            q.push_back(p);
            edsu.add()
        })
    };
    let gedges: Vec<usize> = g
        .edge_list()
        .into_iter()
        .map(|(i, j)| intern((start[i], start[j]), &mut edsu, &mut eleaky, &mut equeue))
        .collect();
    while let Some((i, j)) = equeue.pop_front() {
        let me = intern((i, j), &mut edsu, &mut eleaky, &mut VecDeque::new());
        for l in 0..ls.len() {
            match (image(l, i)?, image(l, j)?) {
                (Some(a), Some(b)) => {
                    let other = intern((a, b), &mut edsu, &mut eleaky, &mut equeue);
                    edsu.union(me, other);
                }
                _ => eleaky[me] = true,
            }
        }
    }
    let mut eclasses: BTreeMap<usize, bool> = BTreeMap::new();
    for e in 0..eleaky.len() {
        let r = edsu.find(e);
        *eclasses.entry(r).or_insert(false) |= eleaky[e];
    }
    let eroots: BTreeSet<usize> = gedges.iter().map(|&e| edsu.find(e)).collect();
    let edge_orbit_count = eroots.len();
    let edge_exactness = exactness(eroots.iter().filter(|r| eclasses[r]).count());

    let mut wedge_values = BTreeMap::new();
    let mut class_wedge: BTreeMap<usize, Scalar> = BTreeMap::new();
    let mut wedge_consistent = true;
    for (k, (i, j)) in g.edge_list().into_iter().enumerate() {
        let w = g.vertices[i].holonomy.cross(&g.vertices[j].holonomy).abs();
        *wedge_values.entry(w.to_string()).or_insert(0) += 1;
        let r = edsu.find(gedges[k]);
        if *class_wedge.entry(r).or_insert_with(|| w.clone()) != w {
            wedge_consistent = false;
        }
    }
    Ok(QuotientReport {
        vertex_orbit_count,
        vertex_exactness,
        edge_orbit_count,
        edge_exactness,
        wedge_values,
        wedge_consistent,
        ambient_bound: bound,
        lifts: ls.len(),
    })
}

/// Classes can only merge through leaking members; with at most one leaking
/// class every class is a whole orbit's trace.
fn exactness(leaky_classes: usize) -> Exactness {
    if leaky_classes <= 1 {
        Exactness::Certified
    } else {
        Exactness::UpperBound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineCandidate {
    /// Sign-normalized derivative.
    pub matrix: Mat2,
    /// Every solved matrix inducing the same vertex map.
    pub matrices: Vec<Mat2>,
    pub det_sign: i32,
    pub is_orientation_preserving: bool,
    pub surface_map: Vec<CornerImage>,
    pub vertex_map: BTreeMap<String, String>,
}

/// Matrices of determinant `±1` carrying the first triangle of the truncation
/// onto others, kept when they induce a valid automorphism of the truncation
/// whose extracted derivative is the matrix itself.  Passing is necessary at
/// this truncation, not a proof.
pub fn automorphism_candidates(s: &Surface, l2: &Scalar, budget: usize) -> Result<Vec<AffineCandidate>> {
    let cat = Catalog::new(s);
    let g = crate::graph::build_graph(&cat, l2);
    let ws = triangles(&cat, &g, budget.max(1))?;
    let Some(t0) = ws.first() else {
        return Ok(Vec::new());
    };
    let one = Scalar::one();
    let v = t0.vectors();
    let mut mats: Vec<Mat2> = Vec::new();
    let mut seen = BTreeSet::new();
    for w in &ws {
        let u = w.vectors();
        for rot in 0..3 {
            for reflect in [false, true] {
                let h: [Vec2; 3] = if reflect {
                    [0, 2, 1].map(|k| u[(rot + k) % 3].clone())
                } else {
                    [0, 1, 2].map(|k| u[(rot + k) % 3].clone())
                };
                let Some(m) = solve_triangle(v, [&h[0], &h[1], &h[2]]) else { continue };
                if m.det().abs() != one || !m.in_field(s.field_d()) {
                    continue;
                }
                let m = sign_normalized(&m);
                if seen.insert(m.key()) {
                    mats.push(m);
                }
            }
        }
    }
    let mut by_map: BTreeMap<BTreeMap<String, String>, usize> = BTreeMap::new();
    let mut out: Vec<AffineCandidate> = Vec::new();
    for m in mats {
        for neg in [false, true] {
            let a = if neg { m.neg() } else { m.clone() };
            let t = s.apply_matrix(&a)?;
            for phi in isometries(&t, s) {
                let iso = automorphism_iso(s, &g, &a, &t, &phi)?;
                if !iso.report.is_valid() {
                    continue;
                }
                match derivative_of_iso(&iso, budget.max(1))? {
                    Derivative::Consistent { matrix, .. } if matrix.eq_up_to_sign(&a) => {}
                    _ => continue,
                }
                let vmap: BTreeMap<String, String> =
                    iso.id_map().into_iter().map(|(x, y)| (x.to_string(), y.to_string())).collect();
                if let Some(&k) = by_map.get(&vmap) {
                    if !out[k].matrices.contains(&a) {
                        out[k].matrices.push(a.clone());
                    }
                    continue;
                }
                by_map.insert(vmap.clone(), out.len());
                let det_sign = a.det().signum();
                out.push(AffineCandidate {
                    matrix: m.clone(),
                    matrices: vec![a.clone()],
                    det_sign,
                    is_orientation_preserving: det_sign > 0,
                    surface_map: phi.corner_map(),
                    vertex_map: vmap,
                });
            }
        }
    }
    Ok(out)
}
