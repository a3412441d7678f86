//! Fitting C¹ composite Bézier curves to data on the Euclidean space, the
//! sphere and the rotation group by minimising a discretised mean squared
//! acceleration with Riemannian gradient descent.
//!
//! The geometry is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases fix it to `f64`.
//!
//! ```
//! use mbezier::{solve, FittingProblem, Lambda, Manifold, Point};
//!
//! let m = Manifold::sphere(2);
//! let data = vec![
//!     Point::from_slice(&[0.0, 0.0, 1.0]),
//!     Point::from_slice(&[0.0, 1.0, 0.0]),
//!     Point::from_slice(&[1.0, 0.0, 0.0]),
//! ];
//! let problem = FittingProblem::new(m, 3, data, Lambda::Finite(5.0), 40)?;
//! let (curve, trace) = solve(&problem)?;
//! assert!(trace.final_objective() < trace.initial_objective());
//! let p = curve.eval(1.5)?;
//! let r: f64 = p.coords().iter().map(|c| c * c).sum();
//! assert!((r - 1.0).abs() < 1e-12);
//! # Ok::<(), mbezier::Error>(())
//! ```

pub mod bezier;
pub mod error;
pub mod experiments;
pub mod manifold;
pub mod objective;
pub mod scalar;
pub mod solver;

pub use bezier::{BezierSegment, CompositeBezier, DeCasteljauTree, LinkedCurve, Mode, VariablePack};
pub use error::{Error, Result};
pub use manifold::{BasedTangent, CurvatureFrame, Geodesic, Manifold, Point, TangentVector};
pub use objective::{
    DifferenceScale, DiscretizationGrid, Evaluation, FittingProblem, GradientCheckRow, Lambda, ObjectiveValue,
};
pub use scalar::Real;
pub use solver::{
    gradient_descent, solve, ArmijoParams, Decrease, Solution, SolverTrace, StoppingCriteria, TerminationReason,
};

pub type Point64 = Point<f64>;
pub type TangentVector64 = TangentVector<f64>;
pub type CompositeBezier64 = CompositeBezier<f64>;
pub type VariablePack64 = VariablePack<f64>;
pub type FittingProblem64 = FittingProblem<f64>;
pub type Point32 = Point<f32>;
pub type TangentVector32 = TangentVector<f32>;
pub type CompositeBezier32 = CompositeBezier<f32>;
