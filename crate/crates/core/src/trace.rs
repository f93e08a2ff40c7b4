//! Straight-line tracing across gluings.

use crate::error::{Error, Result};
use crate::geom::{HalfTranslation, Sign, Vec2};
use crate::scalar::Scalar;
use crate::surface::{EdgeRef, Surface};

/// Where a piece meets the boundary of its polygon.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryPos {
    /// Local corner index.
    Corner(usize),
    /// Point at parameter `t ∈ (0,1)` along a local edge.
    Edge(usize, Scalar),
    /// A start point inside the polygon.
    Interior,
}

impl BoundaryPos {
    pub fn edge_point(&self) -> Option<(usize, &Scalar)> {
        match self {
            BoundaryPos::Edge(e, t) => Some((*e, t)),
            _ => None,
        }
    }
}

/// A straight segment inside one polygon, in that polygon's chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub poly: usize,
    /// Chart of `poly` into the developed frame of the whole trajectory.
    pub placement: HalfTranslation,
    pub from: Vec2,
    pub to: Vec2,
    pub from_pos: BoundaryPos,
    pub to_pos: BoundaryPos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminal {
    HitMarked { corner: usize, class: usize },
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub pieces: Vec<Piece>,
    pub crossings: Vec<EdgeRef>,
    pub terminal: Terminal,
    /// Squared developed length travelled (up to the hit, if any).
    pub len2: Scalar,
    /// Direction in the chart of the last polygon.
    pub final_dir: Vec2,
}

/// A starting point for `trace_ray`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfacePoint {
    Corner(usize),
    Interior { poly: usize, point: Vec2 },
}

#[derive(Clone, Debug, Default)]
pub struct Limits {
    pub max_len2: Option<Scalar>,
    pub max_crossings: Option<usize>,
}

pub const DEFAULT_BUDGET: usize = 10_000;

/// Moves a direction that runs back along the incoming edge of a corner to the
/// next corner, where it runs along the outgoing edge.  Fails if `dir` is not in
/// the closed sector.
pub fn normalize_corner(s: &Surface, c: usize, dir: &Vec2) -> Option<(usize, Vec2)> {
    if s.in_sector(c, dir) {
        return Some((c, dir.clone()));
    }
    let (_, u2) = s.sector(c);
    if u2.same_ray(dir) {
        let (n, sigma) = s.next_corner(c);
        return Some((n, sigma.apply(dir)));
    }
    None
}

/// Walks around the marked point of `c` counterclockwise until the sector
/// containing `dir` (given in the chart of `c`) is found.
pub fn locate_ccw(s: &Surface, c: usize, dir: &Vec2) -> (usize, Vec2) {
    let n = s.classes()[s.class_of(c)].corners.len();
    let mut cur = c;
    let mut d = dir.clone();
    for _ in 0..=n {
        if s.in_sector(cur, &d) {
            return (cur, d);
        }
        let (nx, sigma) = s.next_corner(cur);
        cur = nx;
        d = sigma.apply(&d);
    }
    panic!("direction not found around a marked point");
}

/// Clockwise counterpart of [`locate_ccw`].
pub fn locate_cw(s: &Surface, c: usize, dir: &Vec2) -> (usize, Vec2) {
    let n = s.classes()[s.class_of(c)].corners.len();
    let mut cur = c;
    let mut d = dir.clone();
    for _ in 0..=n {
        if s.in_sector(cur, &d) {
            return (cur, d);
        }
        let (pv, sigma) = s.prev_corner(cur);
        cur = pv;
        d = sigma.apply(&d);
    }
    panic!("direction not found around a marked point");
}

fn edge_param(a: &Vec2, b: &Vec2, q: &Vec2) -> Scalar {
    let ab = b - a;
    &(q - a).dot(&ab) / &ab.norm2()
}

/// Traces from a start point in direction `dir` (chart of the start polygon).
pub(crate) fn trace(s: &Surface, start: &SurfacePoint, dir: &Vec2, lim: &Limits) -> Trajectory {
    let (mut poly, mut z, mut from_pos) = match start {
        SurfacePoint::Corner(c) => {
            let (p, k) = s.corner_ref(*c);
            (p, s.polygon(p).vertex(k).clone(), BoundaryPos::Corner(k))
        }
        SurfacePoint::Interior { poly, point } => (*poly, point.clone(), BoundaryPos::Interior),
    };
    let mut u = dir.clone();
    let mut placement = HalfTranslation::identity();
    let mut entry: Option<usize> = None;
    let mut param = Scalar::zero();
    let mut pieces = Vec::new();
    let mut crossings = Vec::new();
    let dir2 = dir.norm2();
    loop {
        let pg = s.polygon(poly);
        let n = pg.len();
        let mut best: Option<(Scalar, usize)> = None;
        for j in 0..n {
            if Some(j) == entry {
                continue;
            }
            if let BoundaryPos::Corner(k) = from_pos {
                if j == k || (j + 1) % n == k {
                    continue;
                }
            }
            let a = pg.vertex(j);
            let ab = pg.edge_vec(j);
            let den = u.cross(&ab);
            if !den.is_positive() {
                continue;
            }
            let sj = &(a - &z).cross(&ab) / &den;
            if best.as_ref().map_or(true, |(b, _)| sj < *b) {
                best = Some((sj, j));
            }
        }
        let (sp, j) = best.expect("ray leaves a convex polygon");
        let q = &z + &u.scale(&sp);
        let total = &param + &sp;
        let len2 = &(&total * &total) * &dir2;
        if let Some(m) = &lim.max_len2 {
            if len2 > *m {
                return Trajectory {
                    pieces,
                    crossings,
                    terminal: Terminal::BudgetExceeded,
                    len2: &(&param * &param) * &dir2,
                    final_dir: u,
                };
            }
        }
        let a = pg.vertex(j).clone();
        let b = pg.vertex(j + 1).clone();
        let hit = if q == a {
            Some(j)
        } else if q == b {
            Some((j + 1) % n)
        } else {
            None
        };
        if let Some(k) = hit {
            pieces.push(Piece {
                poly,
                placement,
                from: z,
                to: q,
                from_pos,
                to_pos: BoundaryPos::Corner(k),
            });
            let corner = s.corner(poly, k);
            return Trajectory {
                pieces,
                crossings,
                terminal: Terminal::HitMarked { corner, class: s.class_of(corner) },
                len2,
                final_dir: u,
            };
        }
        let t = edge_param(&a, &b, &q);
        let e = EdgeRef::new(poly, j);
        pieces.push(Piece {
            poly,
            placement: placement.clone(),
            from: z,
            to: q.clone(),
            from_pos,
            to_pos: BoundaryPos::Edge(j, t.clone()),
        });
        crossings.push(e);
        if let Some(m) = lim.max_crossings {
            if crossings.len() > m {
                return Trajectory { pieces, crossings, terminal: Terminal::BudgetExceeded, len2, final_dir: u };
            }
        }
        let g = s.glue_map(e);
        let (f, np) = s.cross_edge(&placement, e);
        z = g.apply(&q);
        u = g.apply_vec(&u);
        placement = np;
        poly = f.poly;
        entry = Some(f.edge);
        from_pos = BoundaryPos::Edge(f.edge, &Scalar::one() - &t);
        param = total;
    }
}

fn check_dir(s: &Surface, dir: &Vec2) -> Result<()> {
    if !dir.in_field(s.field_d()) {
        return Err(Error::DirectionLeavesField);
    }
    if dir.is_zero() {
        return Err(Error::InvalidArgument("zero direction".into()));
    }
    Ok(())
}

fn strictly_inside(s: &Surface, poly: usize, z: &Vec2) -> bool {
    let pg = s.polygon(poly);
    (0..pg.len()).all(|j| pg.edge_vec(j).cross(&(z - pg.vertex(j))).is_positive())
}

/// Traces a straight ray until it meets a marked point or exceeds `max_len2`.
pub fn trace_ray(s: &Surface, start: &SurfacePoint, dir: &Vec2, max_len2: &Scalar) -> Result<Trajectory> {
    check_dir(s, dir)?;
    let lim = Limits { max_len2: Some(max_len2.clone()), max_crossings: None };
    match start {
        SurfacePoint::Corner(c) => {
            if *c >= s.num_corners() {
                return Err(Error::InvalidArgument(format!("no corner {c}")));
            }
            let (c2, d2) = normalize_corner(s, *c, dir)
                .ok_or_else(|| Error::InvalidArgument("direction outside the corner sector".into()))?;
            Ok(trace(s, &SurfacePoint::Corner(c2), &d2, &lim))
        }
        SurfacePoint::Interior { poly, point } => {
            if *poly >= s.polygons().len() || !point.in_field(s.field_d()) || !strictly_inside(s, *poly, point) {
                return Err(Error::InvalidArgument("start point must lie strictly inside its polygon".into()));
            }
            Ok(trace(s, start, dir, &lim))
        }
    }
}

/// Product of the frame signs met along a crossing word.
pub fn word_sign(s: &Surface, word: &[EdgeRef]) -> Sign {
    word.iter().fold(Sign::Plus, |acc, e| acc.times(s.partner(*e).1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;

    #[test]
    fn torus_rays() {
        let s = builtin("square_torus").unwrap();
        let nine = Scalar::int(9);
        let t = trace_ray(&s, &SurfacePoint::Corner(0), &Vec2::ints(1, 1), &nine).unwrap();
        assert_eq!(t.len2, Scalar::int(2));
        assert!(matches!(t.terminal, Terminal::HitMarked { .. }));
        let t = trace_ray(&s, &SurfacePoint::Corner(0), &Vec2::ints(2, 1), &nine).unwrap();
        assert_eq!(t.len2, Scalar::int(5));
        assert_eq!(t.pieces.len(), 2);
        let t = trace_ray(&s, &SurfacePoint::Corner(0), &Vec2::ints(1, 0), &Scalar::frac(1, 4)).unwrap();
        assert_eq!(t.terminal, Terminal::BudgetExceeded);
    }

    #[test]
    fn direction_must_stay_in_field() {
        let s = builtin("square_torus").unwrap();
        let d = Vec2::new(Scalar::one(), Scalar::sqrt_of(2));
        assert_eq!(
            trace_ray(&s, &SurfacePoint::Corner(0), &d, &Scalar::one()),
            Err(Error::DirectionLeavesField)
        );
    }
}
