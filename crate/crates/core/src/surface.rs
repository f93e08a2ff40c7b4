//! Polygonal half-translation surfaces: parsing, validation, invariants and
//! the linear action.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{is_strictly_convex_ccw, twice_area, HalfTranslation, Mat2, Sign, Vec2};
use crate::scalar::{is_squarefree, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeRef {
    pub poly: usize,
    pub edge: usize,
}

impl EdgeRef {
    pub fn new(poly: usize, edge: usize) -> Self {
        EdgeRef { poly, edge }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    pub name: String,
    pub vertices: Vec<Vec2>,
}

impl Polygon {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, k: usize) -> &Vec2 {
        &self.vertices[k % self.vertices.len()]
    }

    pub fn edge_vec(&self, e: usize) -> Vec2 {
        self.vertex(e + 1) - self.vertex(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub from: EdgeRef,
    pub to: EdgeRef,
    pub sign: Sign,
}

/// One marked point: the corners identified with it, in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexClass {
    pub corners: Vec<usize>,
    /// `frames[i]` converts a vector in the chart of `corners[i]` to the chart of `corners[0]`.
    pub frames: Vec<Sign>,
    /// Frame change after a full turn.
    pub holonomy: Sign,
    /// Cone angle divided by π.
    pub angle_pi: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceInfo {
    pub genus: u32,
    pub num_marked: usize,
    pub stratum: Vec<i32>,
    pub total_area: Scalar,
    pub is_translation: bool,
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pair().serialize(s)
    }
}

impl Serialize for Vec2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [&self.x, &self.y].serialize(s)
    }
}

impl Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [[&self.a, &self.b], [&self.c, &self.d]].serialize(s)
    }
}

#[derive(Clone, Debug)]
pub struct Surface {
    field_d: u32,
    polygons: Vec<Polygon>,
    gluings: Vec<Gluing>,
    partner: Vec<Vec<(EdgeRef, Sign)>>,
    corner_base: Vec<usize>,
    corner_class: Vec<usize>,
    corner_pos: Vec<usize>,
    classes: Vec<VertexClass>,
}

impl PartialEq for Surface {
    fn eq(&self, o: &Self) -> bool {
        self.field_d == o.field_d && self.polygons == o.polygons && self.partner == o.partner
    }
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileSurface {
    field_d: u32,
    polygons: Vec<FilePolygon>,
    gluings: Vec<FileGluing>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FilePolygon {
    name: String,
    vertices: Vec<[[String; 2]; 2]>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileGluing {
    from: [usize; 2],
    to: [usize; 2],
    sign: i32,
}

pub fn parse_surface(text: &[u8]) -> Result<Surface> {
    Surface::parse(text)
}

impl Surface {
    pub fn parse(text: &[u8]) -> Result<Surface> {
        let f: FileSurface = serde_json::from_slice(text).map_err(|e| Error::Parse(e.to_string()))?;
        let d = f.field_d;
        if !is_squarefree(d) {
            return Err(Error::Parse(format!("field_d {d} is not square-free")));
        }
        let mut polygons = Vec::new();
        for p in f.polygons {
            let mut vs = Vec::new();
            for [x, y] in p.vertices {
                let sx = Scalar::new(Scalar::parse_rational(&x[0])?, Scalar::parse_rational(&x[1])?, d);
                let sy = Scalar::new(Scalar::parse_rational(&y[0])?, Scalar::parse_rational(&y[1])?, d);
                vs.push(Vec2::new(sx, sy));
            }
            polygons.push(Polygon { name: p.name, vertices: vs });
        }
        let mut gluings = Vec::new();
        for g in f.gluings {
            let sign = Sign::from_i32(g.sign).ok_or_else(|| Error::Parse(format!("sign {} not ±1", g.sign)))?;
            gluings.push(Gluing {
                from: EdgeRef::new(g.from[0], g.from[1]),
                to: EdgeRef::new(g.to[0], g.to[1]),
                sign,
            });
        }
        Surface::from_parts(d, polygons, gluings)
    }

    pub fn to_json(&self) -> String {
        let f = FileSurface {
            field_d: self.field_d,
            polygons: self
                .polygons
                .iter()
                .map(|p| FilePolygon {
                    name: p.name.clone(),
                    vertices: p.vertices.iter().map(|v| [v.x.pair(), v.y.pair()]).collect(),
                })
                .collect(),
            gluings: self
                .gluings
                .iter()
                .map(|g| FileGluing {
                    from: [g.from.poly, g.from.edge],
                    to: [g.to.poly, g.to.edge],
                    sign: g.sign.to_i32(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&f).expect("surface serializes")
    }

    /// Builds and validates a surface.
    pub fn from_parts(field_d: u32, polygons: Vec<Polygon>, gluings: Vec<Gluing>) -> Result<Surface> {
        if field_d == 0 || !is_squarefree(field_d) {
            return Err(Error::Parse(format!("field_d {field_d} is not square-free")));
        }
        if polygons.is_empty() {
            return Err(Error::Parse("no polygons".into()));
        }
        for (i, p) in polygons.iter().enumerate() {
            if p.vertices.iter().any(|v| !v.in_field(field_d)) {
                return Err(Error::FieldMismatch(format!("polygon {i} has coordinates outside Q(√{field_d})")));
            }
            if !is_strictly_convex_ccw(&p.vertices) {
                return Err(Error::NonConvexPolygon(i));
            }
        }
        let mut partner: Vec<Vec<Option<(EdgeRef, Sign)>>> =
            polygons.iter().map(|p| vec![None; p.len()]).collect();
        for g in &gluings {
            for e in [g.from, g.to] {
                if e.poly >= polygons.len() || e.edge >= polygons[e.poly].len() {
                    return Err(Error::Parse(format!("gluing refers to missing edge {e:?}")));
                }
            }
            if g.from == g.to {
                return Err(Error::GluingMismatch(format!("edge {:?} glued to itself", g.from)));
            }
            let u = polygons[g.from.poly].edge_vec(g.from.edge);
            let v = polygons[g.to.poly].edge_vec(g.to.edge);
            let ok = match g.sign {
                Sign::Plus => v == -&u,
                Sign::Minus => v == u,
            };
            if !ok {
                return Err(Error::GluingMismatch(format!(
                    "edges {:?} and {:?} have vectors {u} and {v} incompatible with sign {}",
                    g.from,
                    g.to,
                    g.sign.to_i32()
                )));
            }
            for (a, b) in [(g.from, g.to), (g.to, g.from)] {
                if partner[a.poly][a.edge].is_some() {
                    return Err(Error::GluingMismatch(format!("edge {a:?} glued twice")));
                }
                partner[a.poly][a.edge] = Some((b, g.sign));
            }
        }
        let mut full = Vec::new();
        for (i, row) in partner.into_iter().enumerate() {
            let mut r = Vec::new();
            for (e, x) in row.into_iter().enumerate() {
                r.push(x.ok_or_else(|| Error::GluingMismatch(format!("edge ({i}, {e}) is not glued")))?);
            }
            full.push(r);
        }
        let mut corner_base = Vec::new();
        let mut total = 0;
        for p in &polygons {
            corner_base.push(total);
            total += p.len();
        }
        let mut s = Surface {
            field_d,
            polygons,
            gluings,
            partner: full,
            corner_base,
            corner_class: vec![usize::MAX; total],
            corner_pos: vec![0; total],
            classes: Vec::new(),
        };
        s.check_connected()?;
        s.build_classes()?;
        s.check_stratum()?;
        Ok(s)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.polygons.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(p) = stack.pop() {
            for (q, _) in &self.partner[p] {
                if !seen[q.poly] {
                    seen[q.poly] = true;
                    stack.push(q.poly);
                }
            }
        }
        if seen.iter().all(|&b| b) {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    fn build_classes(&mut self) -> Result<()> {
        let total = self.corner_class.len();
        for start in 0..total {
            if self.corner_class[start] != usize::MAX {
                continue;
            }
            let ci = self.classes.len();
            let mut corners = Vec::new();
            let mut frames = Vec::new();
            let mut c = start;
            let mut frame = Sign::Plus;
            loop {
                self.corner_class[c] = ci;
                self.corner_pos[c] = corners.len();
                corners.push(c);
                frames.push(frame);
                let (nc, sigma) = self.next_corner(c);
                frame = frame.times(sigma);
                c = nc;
                if c == start {
                    break;
                }
                if self.corner_class[c] != usize::MAX {
                    return Err(Error::Internal("corner walk did not close".into()));
                }
            }
            let mut vc = VertexClass { corners, frames, holonomy: frame, angle_pi: 0 };
            vc.angle_pi = self.angle_count(&vc);
            if vc.angle_pi == 0 {
                return Err(Error::BadConeAngle(ci));
            }
            self.classes.push(vc);
        }
        Ok(())
    }

    /// Counts half-turns of a ray sweeping all sectors of the class.
    fn angle_count(&self, vc: &VertexClass) -> u32 {
        let (d0, _) = self.sector(vc.corners[0]);
        let mut count = 0;
        let mut rays: Vec<Vec2> = Vec::new();
        for (i, &c) in vc.corners.iter().enumerate() {
            let (u1, _) = self.sector(c);
            rays.push(vc.frames[i].apply(&u1));
        }
        rays.push(vc.holonomy.apply(&d0));
        for w in rays.windows(2) {
            let sa = d0.cross(&w[0]).signum();
            let sb = d0.cross(&w[1]).signum();
            if (sa > 0 && sb <= 0) || (sa < 0 && sb >= 0) {
                count += 1;
            }
        }
        count
    }

    fn check_stratum(&self) -> Result<()> {
        let v = self.classes.len() as i64;
        let e = self.gluings.len() as i64;
        let f = self.polygons.len() as i64;
        let chi = v - e + f;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(Error::StratumError(format!("Euler characteristic {chi}")));
        }
        let g = (2 - chi) / 2;
        let sum: i64 = self.classes.iter().map(|c| c.angle_pi as i64 - 2).sum();
        if sum != 4 * g - 4 {
            return Err(Error::StratumError(format!("sum of orders {sum} != 4g-4 with g={g}")));
        }
        Ok(())
    }

    pub fn field_d(&self) -> u32 {
        self.field_d
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn polygon(&self, i: usize) -> &Polygon {
        &self.polygons[i]
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn classes(&self) -> &[VertexClass] {
        &self.classes
    }

    pub fn num_corners(&self) -> usize {
        self.corner_class.len()
    }

    pub fn corner(&self, poly: usize, k: usize) -> usize {
        self.corner_base[poly] + k % self.polygons[poly].len()
    }

    pub fn corner_ref(&self, c: usize) -> (usize, usize) {
        let p = match self.corner_base.binary_search(&c) {
            Ok(p) => p,
            Err(p) => p - 1,
        };
        (p, c - self.corner_base[p])
    }

    pub fn corner_point(&self, c: usize) -> &Vec2 {
        let (p, k) = self.corner_ref(c);
        self.polygons[p].vertex(k)
    }

    pub fn class_of(&self, c: usize) -> usize {
        self.corner_class[c]
    }

    pub fn walk_pos(&self, c: usize) -> usize {
        self.corner_pos[c]
    }

    pub fn partner(&self, e: EdgeRef) -> (EdgeRef, Sign) {
        self.partner[e.poly][e.edge]
    }

    /// Representative of an edge pair: the smaller of the two sides.
    pub fn canonical_edge(&self, e: EdgeRef) -> EdgeRef {
        let (f, _) = self.partner(e);
        e.min(f)
    }

    pub fn edge_vec(&self, e: EdgeRef) -> Vec2 {
        self.polygons[e.poly].edge_vec(e.edge)
    }

    /// Sector `[u1, u2)` at a corner: `u1` along the outgoing edge, `u2` back along the incoming one.
    pub fn sector(&self, c: usize) -> (Vec2, Vec2) {
        let (p, k) = self.corner_ref(c);
        let poly = &self.polygons[p];
        let n = poly.len();
        let v = poly.vertex(k);
        (poly.vertex(k + 1) - v, poly.vertex(k + n - 1) - v)
    }

    /// Whether `dir` lies in the half-open sector `[u1, u2)`.
    pub fn in_sector(&self, c: usize, dir: &Vec2) -> bool {
        let (u1, u2) = self.sector(c);
        u1.same_ray(dir) || (u1.cross(dir).is_positive() && dir.cross(&u2).is_positive())
    }

    /// Next corner counterclockwise around the marked point and the frame sign of the step.
    pub fn next_corner(&self, c: usize) -> (usize, Sign) {
        let (p, k) = self.corner_ref(c);
        let n = self.polygons[p].len();
        let (q, sigma) = self.partner(EdgeRef::new(p, (k + n - 1) % n));
        (self.corner(q.poly, q.edge), sigma)
    }

    /// Previous corner (clockwise) and the sign converting vectors from `c` to it.
    pub fn prev_corner(&self, c: usize) -> (usize, Sign) {
        let (p, k) = self.corner_ref(c);
        let (q, sigma) = self.partner(EdgeRef::new(p, k));
        (self.corner(q.poly, q.edge + 1), sigma)
    }

    /// Chart change of the gluing across `e`, from the chart of `e.poly` to its partner.
    pub fn glue_map(&self, e: EdgeRef) -> HalfTranslation {
        let (f, sigma) = self.partner(e);
        let v = self.polygons[e.poly].vertex(e.edge);
        let w = self.polygons[f.poly].vertex(f.edge + 1);
        HalfTranslation { sign: sigma, offset: w - &sigma.apply(v) }
    }

    /// Development of the neighbour across `e` given the development of `e.poly`.
    pub fn cross_edge(&self, placement: &HalfTranslation, e: EdgeRef) -> (EdgeRef, HalfTranslation) {
        let (f, _) = self.partner(e);
        (f, placement.compose(&self.glue_map(e).inverse()))
    }

    pub fn developed_vertices(&self, poly: usize, placement: &HalfTranslation) -> Vec<Vec2> {
        self.polygons[poly].vertices.iter().map(|v| placement.apply(v)).collect()
    }

    /// Frame change from corner `a` to corner `b` of the same class, walking
    /// counterclockwise; `wrap` adds a full turn.
    pub fn walk_frame(&self, a: usize, b: usize, wrap: bool) -> Sign {
        let cls = &self.classes[self.class_of(a)];
        debug_assert_eq!(self.class_of(a), self.class_of(b));
        let fa = cls.frames[self.corner_pos[a]];
        let fb = cls.frames[self.corner_pos[b]];
        let s = fa.times(fb);
        if wrap {
            s.times(cls.holonomy)
        } else {
            s
        }
    }

    pub fn total_area(&self) -> Scalar {
        let mut t = Scalar::zero();
        for p in &self.polygons {
            t += &twice_area(&p.vertices);
        }
        &t / &Scalar::int(2)
    }

    pub fn genus(&self) -> u32 {
        let chi = self.classes.len() as i64 - self.gluings.len() as i64 + self.polygons.len() as i64;
        ((2 - chi) / 2) as u32
    }

    /// Decided by two-colouring the polygons.
    pub fn is_translation(&self) -> bool {
        let n = self.polygons.len();
        let mut color: Vec<Option<Sign>> = vec![None; n];
        color[0] = Some(Sign::Plus);
        let mut stack = vec![0];
        while let Some(p) = stack.pop() {
            let cp = color[p].unwrap();
            for (q, sigma) in &self.partner[p] {
                let want = cp.times(*sigma);
                match color[q.poly] {
                    None => {
                        color[q.poly] = Some(want);
                        stack.push(q.poly);
                    }
                    Some(c) if c != want => return false,
                    _ => {}
                }
            }
        }
        true
    }

    pub fn info(&self) -> SurfaceInfo {
        let mut stratum: Vec<i32> = self.classes.iter().map(|c| c.angle_pi as i32 - 2).collect();
        stratum.sort_unstable_by(|a, b| b.cmp(a));
        SurfaceInfo {
            genus: self.genus(),
            num_marked: self.classes.len(),
            stratum,
            total_area: self.total_area(),
            is_translation: self.is_translation(),
        }
    }

    /// Corner index of `c` after `apply_matrix` with a matrix of the given determinant sign.
    pub fn corner_after_matrix(&self, c: usize, det_negative: bool) -> usize {
        if !det_negative {
            return c;
        }
        let (p, k) = self.corner_ref(c);
        let n = self.polygons[p].len();
        self.corner(p, (n - k) % n)
    }

    pub fn apply_matrix(&self, a: &Mat2) -> Result<Surface> {
        if !a.in_field(self.field_d) {
            return Err(Error::FieldMismatch(format!("matrix {a} is not over Q(√{})", self.field_d)));
        }
        let det = a.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let flip = det.is_negative();
        let polygons = self
            .polygons
            .iter()
            .map(|p| {
                let n = p.len();
                let vertices = (0..n)
                    .map(|j| a.apply(p.vertex(if flip { (n - j) % n } else { j })))
                    .collect();
                Polygon { name: p.name.clone(), vertices }
            })
            .collect();
        let remap = |e: EdgeRef| {
            if flip {
                let n = self.polygons[e.poly].len();
                EdgeRef::new(e.poly, n - 1 - e.edge)
            } else {
                e
            }
        };
        let gluings = self
            .gluings
            .iter()
            .map(|g| Gluing { from: remap(g.from), to: remap(g.to), sign: g.sign })
            .collect();
        Surface::from_parts(self.field_d, polygons, gluings)
    }

    /// Classes keyed by angle, for reporting.
    pub fn angle_histogram(&self) -> BTreeMap<u32, usize> {
        let mut m = BTreeMap::new();
        for c in &self.classes {
            *m.entry(c.angle_pi).or_insert(0) += 1;
        }
        m
    }
}

pub fn surface_info(s: &Surface) -> SurfaceInfo {
    s.info()
}

pub fn apply_matrix(s: &Surface, a: &Mat2) -> Result<Surface> {
    s.apply_matrix(a)
}

fn square(x0: i64, y0: i64) -> Vec<Vec2> {
    vec![
        Vec2::ints(x0, y0),
        Vec2::ints(x0 + 1, y0),
        Vec2::ints(x0 + 1, y0 + 1),
        Vec2::ints(x0, y0 + 1),
    ]
}

fn glue(a: (usize, usize), b: (usize, usize), sign: Sign) -> Gluing {
    Gluing { from: EdgeRef::new(a.0, a.1), to: EdgeRef::new(b.0, b.1), sign }
}

pub const BUILTIN_NAMES: [&str; 3] = ["square_torus", "regular_octagon", "L_shape_2x1"];

pub fn builtin(name: &str) -> Result<Surface> {
    let plus = Sign::Plus;
    match name {
        "square_torus" => Surface::from_parts(
            1,
            vec![Polygon { name: "square".into(), vertices: square(0, 0) }],
            vec![glue((0, 0), (0, 2), plus), glue((0, 1), (0, 3), plus)],
        ),
        "regular_octagon" => {
            let a = Scalar::quad(1, 1, 2);
            let one = Scalar::one();
            let pts = [
                (a.clone(), -&one),
                (a.clone(), one.clone()),
                (one.clone(), a.clone()),
                (-&one, a.clone()),
                (-&a, one.clone()),
                (-&a, -&one),
                (-&one, -&a),
                (one.clone(), -&a),
            ];
            let vertices = pts.into_iter().map(|(x, y)| Vec2::new(x, y)).collect();
            Surface::from_parts(
                2,
                vec![Polygon { name: "octagon".into(), vertices }],
                (0..4).map(|i| glue((0, i), (0, i + 4), plus)).collect(),
            )
        }
        "L_shape_2x1" => Surface::from_parts(
            1,
            vec![
                Polygon { name: "base".into(), vertices: square(0, 0) },
                Polygon { name: "right".into(), vertices: square(1, 0) },
                Polygon { name: "top".into(), vertices: square(0, 1) },
            ],
            vec![
                glue((0, 1), (1, 3), plus),
                glue((1, 1), (0, 3), plus),
                glue((0, 2), (2, 0), plus),
                glue((2, 2), (0, 0), plus),
                glue((2, 1), (2, 3), plus),
                glue((1, 2), (1, 0), plus),
            ],
        ),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_info() {
        let s = builtin("square_torus").unwrap();
        let i = s.info();
        assert_eq!((i.genus, i.num_marked, i.stratum.clone()), (1, 1, vec![0]));
        assert_eq!(i.total_area, Scalar::one());
        assert!(i.is_translation);
    }

    #[test]
    fn octagon_info() {
        let s = builtin("regular_octagon").unwrap();
        let i = s.info();
        assert_eq!((i.genus, i.num_marked, i.stratum.clone()), (2, 1, vec![4]));
        assert_eq!(i.total_area, Scalar::quad(8, 8, 2));
    }

    #[test]
    fn l_shape_info() {
        let i = builtin("L_shape_2x1").unwrap().info();
        assert_eq!((i.genus, i.stratum.clone()), (2, vec![4]));
    }

    #[test]
    fn next_and_prev_are_inverse() {
        let s = builtin("L_shape_2x1").unwrap();
        for c in 0..s.num_corners() {
            let (n, sg) = s.next_corner(c);
            let (p, sg2) = s.prev_corner(n);
            assert_eq!((p, sg), (c, sg2));
        }
    }
}
