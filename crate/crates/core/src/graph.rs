//! The truncated saddle connection graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::saddle::{intersections, interleave, Catalog, SaddleConnection};
use crate::scalar::Scalar;
use crate::surface::{EdgeRef, Surface};
use crate::trace::BoundaryPos;
use crate::triangulation::{complete_triangulation, Face};

#[derive(Clone, Debug)]
pub struct ScGraph {
    pub l2: Scalar,
    /// In canonical order (squared length, then id).
    pub vertices: Vec<SaddleConnection>,
    pub index: BTreeMap<String, usize>,
    /// Sorted neighbour lists.
    pub adj: Vec<Vec<usize>>,
}

/// Integer summary of a connection used for fast pairwise tests.
struct Ranked {
    boundary: Option<usize>,
    /// `(poly, from, to)` boundary positions as `(edge << 32) | rank`.
    chords: Vec<(usize, u64, u64)>,
    /// Canonical-side crossing points `(edge pair, rank)`, sorted.
    crossings: Vec<(usize, u64)>,
}

fn rank_all(s: &Surface, scs: &[SaddleConnection]) -> Vec<Ranked> {
    let mut values: BTreeMap<(usize, usize), BTreeSet<Scalar>> = BTreeMap::new();
    for sc in scs {
        for p in &sc.pieces {
            for pos in [&p.from_pos, &p.to_pos] {
                if let BoundaryPos::Edge(e, t) = pos {
                    values.entry((p.poly, *e)).or_default().insert(t.clone());
                }
            }
        }
    }
    let sorted: BTreeMap<(usize, usize), Vec<Scalar>> =
        values.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect();
    let mut edge_no: BTreeMap<EdgeRef, usize> = BTreeMap::new();
    for (i, g) in s.gluings().iter().enumerate() {
        edge_no.insert(s.canonical_edge(g.from), i);
    }
    let key = |poly: usize, pos: &BoundaryPos| -> u64 {
        match pos {
            BoundaryPos::Corner(k) => (*k as u64) << 32,
            BoundaryPos::Edge(e, t) => {
                let r = sorted[&(poly, *e)].binary_search(t).expect("ranked value");
                ((*e as u64) << 32) | (r as u64 + 1)
            }
            BoundaryPos::Interior => unreachable!(),
        }
    };
    scs.iter()
        .map(|sc| {
            let boundary = sc.boundary_edge.map(|e| edge_no[&e]);
            let mut chords = Vec::new();
            let mut crossings = Vec::new();
            for p in &sc.pieces {
                chords.push((p.poly, key(p.poly, &p.from_pos), key(p.poly, &p.to_pos)));
                for pos in [&p.from_pos, &p.to_pos] {
                    if let BoundaryPos::Edge(e, _) = pos {
                        let er = EdgeRef::new(p.poly, *e);
                        if s.canonical_edge(er) == er {
                            crossings.push((edge_no[&er], key(p.poly, pos)));
                        }
                    }
                }
            }
            chords.sort();
            crossings.sort();
            Ranked { boundary, chords, crossings }
        })
        .collect()
}

fn ranked_disjoint(a: &Ranked, b: &Ranked) -> bool {
    match (a.boundary, b.boundary) {
        (Some(_), Some(_)) => true,
        (Some(e), None) => !b.crossings.iter().any(|(f, _)| *f == e),
        (None, Some(e)) => !a.crossings.iter().any(|(f, _)| *f == e),
        (None, None) => {
            // shared crossing points
            let (mut i, mut j) = (0, 0);
            while i < a.crossings.len() && j < b.crossings.len() {
                match a.crossings[i].cmp(&b.crossings[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => return false,
                }
            }
            // chords in common polygons
            let mut j0 = 0;
            for ca in &a.chords {
                while j0 < b.chords.len() && b.chords[j0].0 < ca.0 {
                    j0 += 1;
                }
                let mut j = j0;
                while j < b.chords.len() && b.chords[j].0 == ca.0 {
                    let cb = &b.chords[j];
                    if interleave(ca.1, ca.2, cb.1, cb.2) {
                        return false;
                    }
                    j += 1;
                }
            }
            true
        }
    }
}

/// Disjointness graph on all connections with squared length at most `l2`.
pub fn build_graph(cat: &Catalog, l2: &Scalar) -> ScGraph {
    let vertices = cat.enumerate(l2);
    graph_on(cat.surface, l2.clone(), vertices)
}

/// Graph on an explicit vertex list; `l2` is recorded, not enforced.
pub fn graph_on(s: &Surface, l2: Scalar, vertices: Vec<SaddleConnection>) -> ScGraph {
    let ranked = rank_all(s, &vertices);
    let n = vertices.len();
    let row = |i: usize| -> Vec<usize> { (i + 1..n).filter(|&j| ranked_disjoint(&ranked[i], &ranked[j])).collect() };
    #[cfg(feature = "parallel")]
    let upper: Vec<Vec<usize>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let upper: Vec<Vec<usize>> = (0..n).map(row).collect();
    let mut adj = vec![Vec::new(); n];
    for (i, r) in upper.into_iter().enumerate() {
        for j in r {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    let index = vertices.iter().enumerate().map(|(i, v)| (v.id.clone(), i)).collect();
    ScGraph { l2, vertices, index, adj }
}

impl ScGraph {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    /// Edge list `(i, j)` with `i < j`, sorted.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.adj.iter().enumerate() {
            for &j in a {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Breadth-first distance inside the truncation; `None` when unreachable.
    /// Removing vertices cannot shorten paths, so this bounds the distance in the
    /// full graph from above.
    pub fn distance(&self, from: &str, to: &str) -> Result<Option<usize>> {
        let a = self.vertex(from)?;
        let b = self.vertex(to)?;
        Ok(self.bfs(a)[b])
    }

    pub fn bfs(&self, a: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[a] = Some(0);
        let mut q = VecDeque::from([a]);
        while let Some(u) = q.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    q.push_back(v);
                }
            }
        }
        dist
    }

    pub fn export(&self, s: &Surface, format: &str) -> Result<String> {
        match format {
            "dot" => {
                let mut out = String::from("graph sc {\n");
                for v in &self.vertices {
                    out.push_str(&format!("  \"{}\";\n", v.id));
                }
                for (i, j) in self.edge_list() {
                    out.push_str(&format!("  \"{}\" -- \"{}\";\n", self.vertices[i].id, self.vertices[j].id));
                }
                out.push_str("}\n");
                Ok(out)
            }
            "jsonl" => {
                let mut out = String::new();
                for v in &self.vertices {
                    let line = JsonlLine::Vertex(v.record(s));
                    out.push_str(&serde_json::to_string(&line).expect("record serializes"));
                    out.push('\n');
                }
                for (i, j) in self.edge_list() {
                    let line = JsonlLine::Edge { a: self.vertices[i].id.clone(), b: self.vertices[j].id.clone() };
                    out.push_str(&serde_json::to_string(&line).expect("edge serializes"));
                    out.push('\n');
                }
                Ok(out)
            }
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum JsonlLine {
    Vertex(crate::saddle::ScRecord),
    Edge { a: String, b: String },
}

/// Vertex ids and edges read back from a JSON-lines export.
pub fn import_jsonl(text: &str) -> Result<(Vec<String>, BTreeSet<(String, String)>)> {
    let mut vs = Vec::new();
    let mut es = BTreeSet::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        match serde_json::from_str::<JsonlLine>(line).map_err(|e| Error::Parse(e.to_string()))? {
            JsonlLine::Vertex(r) => vs.push(r.id),
            JsonlLine::Edge { a, b } => {
                es.insert((a, b));
            }
        }
    }
    Ok((vs, es))
}

/// A face of some triangulation with the given three sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleWitness {
    /// Side ids in counterclockwise face order.
    pub sides: [String; 3],
    pub face: Face,
}

impl TriangleWitness {
    /// Oriented side holonomies, summing to zero.
    pub fn vectors(&self) -> &[Vec2; 3] {
        &self.face.vectors
    }

    pub fn side_set(&self) -> BTreeSet<String> {
        self.sides.iter().cloned().collect()
    }
}

/// Whether some choice of signs makes the three holonomies sum to zero.
pub fn holonomy_zero_sum(a: &Vec2, b: &Vec2, c: &Vec2) -> bool {
    for sb in [1, -1] {
        for sc in [1, -1] {
            let bb = if sb == 1 { b.clone() } else { -b };
            let cc = if sc == 1 { c.clone() } else { -c };
            if (&(a + &bb) + &cc).is_zero() {
                return true;
            }
        }
    }
    false
}

/// Faces bounded by the three connections; empty when they bound no triangle.
pub fn bounds_triangle(
    cat: &Catalog,
    a: &SaddleConnection,
    b: &SaddleConnection,
    c: &SaddleConnection,
) -> Result<Vec<TriangleWitness>> {
    let s = cat.surface;
    if a.id == b.id || b.id == c.id || a.id == c.id {
        return Err(Error::NotPairwiseDisjoint);
    }
    if intersections(s, a, b) > 0 || intersections(s, b, c) > 0 || intersections(s, a, c) > 0 {
        return Err(Error::NotPairwiseDisjoint);
    }
    if !holonomy_zero_sum(&a.holonomy, &b.holonomy, &c.holonomy) {
        return Ok(Vec::new());
    }
    let t = complete_triangulation(cat, &[a.clone(), b.clone(), c.clone()])?;
    let want: BTreeSet<&str> = [a.id.as_str(), b.id.as_str(), c.id.as_str()].into_iter().collect();
    let mut out = Vec::new();
    for f in &t.faces {
        let ids = t.face_ids(f);
        if ids.iter().copied().collect::<BTreeSet<&str>>() == want {
            out.push(TriangleWitness { sides: ids.map(|x| x.to_string()), face: f.clone() });
        }
    }
    Ok(out)
}

/// Triangle witnesses among mutually adjacent triples, in index order.
pub fn triangles(cat: &Catalog, g: &ScGraph, max_count: usize) -> Result<Vec<TriangleWitness>> {
    let mut out = Vec::new();
    let n = g.num_vertices();
    for i in 0..n {
        for &j in g.adj[i].iter().filter(|&&j| j > i) {
            for &k in g.adj[j].iter().filter(|&&k| k > j) {
                if !g.has_edge(i, k) {
                    continue;
                }
                let (a, b, c) = (&g.vertices[i], &g.vertices[j], &g.vertices[k]);
                if !holonomy_zero_sum(&a.holonomy, &b.holonomy, &c.holonomy) {
                    continue;
                }
                for w in bounds_triangle(cat, a, b, c)? {
                    if out.len() >= max_count {
                        return Ok(out);
                    }
                    out.push(w);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;

    #[test]
    fn torus_small_graphs() {
        let s = builtin("square_torus").unwrap();
        let cat = Catalog::new(&s);
        let g = build_graph(&cat, &Scalar::int(2));
        assert_eq!((g.num_vertices(), g.num_edges()), (4, 5));
        let g1 = build_graph(&cat, &Scalar::int(1));
        assert_eq!((g1.num_vertices(), g1.num_edges()), (2, 1));
        let g0 = build_graph(&cat, &Scalar::frac(1, 2));
        assert_eq!((g0.num_vertices(), g0.num_edges()), (0, 0));
    }

    #[test]
    fn torus_triangles() {
        let s = builtin("square_torus").unwrap();
        let cat = Catalog::new(&s);
        let g = build_graph(&cat, &Scalar::int(2));
        let ts = triangles(&cat, &g, 100).unwrap();
        assert_eq!(ts.len(), 4);
    }
}
