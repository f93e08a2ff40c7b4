//! Browser bindings: one surface at a time, drawn as SVG strings that the page
//! drops into the DOM.

use halftrans::draw::render_svg;
use halftrans::flow::direction_decomposition;
use halftrans::saddle::Catalog;
use halftrans::triangulation::{complete_triangulation, flip, FlipOutcome, Triangulation};
use halftrans::{builtin, Scalar, Surface, Vec2};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: halftrans::Error) -> String {
    json!({"error": e.code(), "detail": e.to_string()}).to_string()
}

fn scalar(text: &str, s: &Surface) -> Result<Scalar, String> {
    Scalar::parse(text, s.field_d()).map_err(err)
}

#[wasm_bindgen]
pub struct Demo {
    surface: Surface,
    triangulation: Triangulation,
    flips: Vec<String>,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(name: &str) -> Result<Demo, String> {
        let surface = builtin(name).map_err(err)?;
        let triangulation = complete_triangulation(&Catalog::new(&surface), &[]).map_err(err)?;
        Ok(Demo { surface, triangulation, flips: Vec::new() })
    }

    pub fn info(&self) -> String {
        serde_json::to_string(&self.surface.info()).expect("serializable")
    }

    /// Polygons with every connection of squared length at most `len2`.
    pub fn connections_svg(&self, len2: &str) -> Result<String, String> {
        let l2 = scalar(len2, &self.surface)?;
        if !l2.is_positive() {
            return Err("len2 must be positive".into());
        }
        let scs = Catalog::new(&self.surface).enumerate(&l2);
        Ok(render_svg(&self.surface, &scs, None))
    }

    /// Cylinder bands and parallel connections in the direction `"x,y"`.
    pub fn cylinders_svg(&self, dir: &str) -> Result<String, String> {
        let (x, y) = dir.split_once(',').ok_or("direction must be \"x,y\"")?;
        let v = Vec2::new(scalar(x, &self.surface)?, scalar(y, &self.surface)?);
        if v.is_zero() {
            return Err("zero direction".into());
        }
        let dec = direction_decomposition(&self.surface, &v, None).map_err(err)?;
        let ids: Vec<String> = match &dec {
            halftrans::flow::Decomposition::Periodic { saddle_connections, .. } => saddle_connections.clone(),
            halftrans::flow::Decomposition::Unknown => Vec::new(),
        };
        let scs: Vec<_> = ids
            .iter()
            .map(|id| halftrans::saddle::from_id(&self.surface, id))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        Ok(render_svg(&self.surface, &scs, Some(&dec)))
    }

    /// JSON summary of the same decomposition.
    pub fn cylinders_json(&self, dir: &str) -> Result<String, String> {
        let (x, y) = dir.split_once(',').ok_or("direction must be \"x,y\"")?;
        let v = Vec2::new(scalar(x, &self.surface)?, scalar(y, &self.surface)?);
        let dec = direction_decomposition(&self.surface, &v, None).map_err(err)?;
        Ok(serde_json::to_string(&dec).expect("serializable"))
    }

    pub fn triangulation_svg(&self) -> String {
        render_svg(&self.surface, &self.triangulation.edges, None)
    }

    /// Current edge ids, in the order `flip` indexes them.
    pub fn edges(&self) -> String {
        serde_json::to_string(&self.triangulation.key()).expect("serializable")
    }

    /// Flips edge `k`; returns the new edge id, or an error when the
    /// quadrilateral around it is not strictly convex.
    pub fn flip(&mut self, k: usize) -> Result<String, String> {
        let key = self.triangulation.key();
        let id = key.get(k).ok_or("no such edge")?;
        match flip(&self.surface, &self.triangulation, id).map_err(err)? {
            FlipOutcome::Flipped { triangulation, new_edge } => {
                self.triangulation = triangulation;
                self.flips.push(id.clone());
                Ok(new_edge)
            }
            FlipOutcome::NotFlippable { reason } => Err(reason),
        }
    }

    pub fn flip_count(&self) -> usize {
        self.flips.len()
    }

    pub fn reset(&mut self) -> Result<(), String> {
        self.triangulation = complete_triangulation(&Catalog::new(&self.surface), &[]).map_err(err)?;
        self.flips.clear();
        Ok(())
    }
}
