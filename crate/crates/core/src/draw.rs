//! Static SVG pictures of a surface: polygons side by side, edge pairing
//! labels, developed saddle connections and cylinder bands.
//!
//! Coordinates are converted to floats here and only here; nothing drawn is
//! fed back into exact computations.

use std::fmt::Write;

use crate::flow::Decomposition;
use crate::saddle::SaddleConnection;
use crate::surface::{EdgeRef, Surface};

const PALETTE: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];
const WIDTH: f64 = 720.0;
const PAD: f64 = 24.0;

struct Layout {
    scale: f64,
    /// Horizontal shift per polygon, in surface units.
    shift: Vec<f64>,
    ymax: f64,
    height: f64,
}

impl Layout {
    fn new(s: &Surface) -> Layout {
        let mut shift = Vec::new();
        let mut cursor = 0.0;
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in s.polygons() {
            let pts: Vec<(f64, f64)> = p.vertices.iter().map(|v| v.to_f64()).collect();
            let x0 = pts.iter().map(|q| q.0).fold(f64::INFINITY, f64::min);
            let x1 = pts.iter().map(|q| q.0).fold(f64::NEG_INFINITY, f64::max);
            for q in &pts {
                ymin = ymin.min(q.1);
                ymax = ymax.max(q.1);
            }
            shift.push(cursor - x0);
            cursor += x1 - x0 + 0.25;
        }
        let span = (cursor - 0.25).max(1e-9);
        let scale = (WIDTH - 2.0 * PAD) / span;
        let height = (ymax - ymin) * scale + 2.0 * PAD;
        Layout { scale, shift, ymax, height }
    }

    fn pt(&self, poly: usize, (x, y): (f64, f64)) -> (f64, f64) {
        (PAD + (x + self.shift[poly]) * self.scale, PAD + (self.ymax - y) * self.scale)
    }
}

fn path(points: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
    d
}

/// Part of a convex polygon with `y0 < cross(dir, z) < y1`.
fn band(pts: &[(f64, f64)], dir: (f64, f64), y0: f64, y1: f64) -> Vec<(f64, f64)> {
    let h = |p: &(f64, f64)| dir.0 * p.1 - dir.1 * p.0;
    let clip = |pts: Vec<(f64, f64)>, keep: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 0..pts.len() {
            let (p, q) = (pts[i], pts[(i + 1) % pts.len()]);
            let (fp, fq) = (keep(h(&p)), keep(h(&q)));
            if fp >= 0.0 {
                out.push(p);
            }
            if (fp >= 0.0) != (fq >= 0.0) {
                let t = fp / (fp - fq);
                out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
            }
        }
        out
    };
    let lower = clip(pts.to_vec(), &|y| y - y0);
    clip(lower, &|y| y1 - y)
}

/// Renders polygons, optional cylinder bands and connections as one SVG document.
pub fn render_svg(s: &Surface, connections: &[SaddleConnection], cylinders: Option<&Decomposition>) -> String {
    let lay = Layout::new(s);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{:.0}" viewBox="0 0 {WIDTH:.0} {:.0}">"#,
        lay.height, lay.height
    );
    let polys: Vec<Vec<(f64, f64)>> =
        s.polygons().iter().map(|p| p.vertices.iter().map(|v| v.to_f64()).collect()).collect();
    for (i, pts) in polys.iter().enumerate() {
        let scr: Vec<(f64, f64)> = pts.iter().map(|&q| lay.pt(i, q)).collect();
        let _ = writeln!(out, r##"<path d="{}" fill="#f4f4f4" stroke="none"/>"##, path(&scr));
    }
    if let Some(Decomposition::Periodic { direction, slabs, .. }) = cylinders {
        let dir = direction.to_f64();
        for sl in slabs {
            let piece = band(&polys[sl.poly], dir, sl.y0.to_f64(), sl.y1.to_f64());
            if piece.len() < 3 {
                continue;
            }
            let scr: Vec<(f64, f64)> = piece.iter().map(|&q| lay.pt(sl.poly, q)).collect();
            let color = PALETTE[sl.cylinder % PALETTE.len()];
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="{color}" fill-opacity="0.25" stroke="none" data-cylinder="{}"/>"#,
                path(&scr),
                sl.cylinder
            );
        }
    }
    for (i, pts) in polys.iter().enumerate() {
        let scr: Vec<(f64, f64)> = pts.iter().map(|&q| lay.pt(i, q)).collect();
        let _ = writeln!(out, r##"<path d="{}" fill="none" stroke="#333" stroke-width="1.5"/>"##, path(&scr));
        for k in 0..pts.len() {
            let e = s.canonical_edge(EdgeRef::new(i, k));
            let label = s.gluings().iter().position(|g| s.canonical_edge(g.from) == e).unwrap_or(0);
            let (a, b) = (scr[k], scr[(k + 1) % scr.len()]);
            let _ = writeln!(
                out,
                r##"<text x="{:.2}" y="{:.2}" font-size="11" fill="#666" text-anchor="middle">{label}</text>"##,
                (a.0 + b.0) / 2.0,
                (a.1 + b.1) / 2.0
            );
        }
    }
    for (n, sc) in connections.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        for p in &sc.pieces {
            let a = lay.pt(p.poly, p.from.to_f64());
            let b = lay.pt(p.poly, p.to.to_f64());
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2" data-id="{}"/>"#,
                a.0, a.1, b.0, b.1, sc.id
            );
        }
    }
    for (i, p) in s.polygons().iter().enumerate() {
        for v in &p.vertices {
            let (x, y) = lay.pt(i, v.to_f64());
            let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#000"/>"##);
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saddle::Catalog;
    use crate::scalar::Scalar;
    use crate::surface::builtin;

    #[test]
    fn torus_picture_has_one_line_per_piece() {
        let s = builtin("square_torus").unwrap();
        let scs = Catalog::new(&s).enumerate(&Scalar::int(5));
        let pieces: usize = scs.iter().map(|sc| sc.pieces.len()).sum();
        let svg = render_svg(&s, &scs, None);
        assert_eq!(svg.matches("<line").count(), pieces);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
}
