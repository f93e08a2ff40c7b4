//! Exact computations on half-translation surfaces: saddle connections and
//! their disjointness graph, triangulations and flips, cylinders, admissible
//! polygons, and affine rigidity checks.

pub mod admissible;
pub mod draw;
pub mod error;
pub mod flow;
pub mod saddle;
pub mod geom;
pub mod graph;
pub mod rigidity;
pub mod scalar;
pub mod surface;
pub mod trace;
pub mod triangulation;

pub use error::{Error, Result};
pub use geom::{mat_apply, mat_inverse, orient, seg_relation, HalfTranslation, Mat2, SegRelation, Sign, Vec2};
pub use scalar::{scalar_sign, Scalar};
pub use surface::{apply_matrix, builtin, parse_surface, surface_info, EdgeRef, Gluing, Polygon, Surface, SurfaceInfo};
