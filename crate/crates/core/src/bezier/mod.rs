//! Composite Bézier curves on a manifold, evaluated with the De Casteljau
//! recursion, and their differentials with respect to the control points.

mod composite;
mod pack;
mod segment;
mod tree;

pub use composite::{CompositeBezier, C1_TOL, JUNCTION_TOL};
pub use pack::{free_count, slot, LinkedCurve, Mode, Slot, VariablePack};
pub use segment::{bernstein_eval_euclidean, BezierSegment};
pub use tree::DeCasteljauTree;
