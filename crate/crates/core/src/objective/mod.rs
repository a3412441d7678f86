//! Discretised mean squared acceleration of a composite Bézier curve, the
//! data term, and their gradients with respect to the free control points.

mod grid;
mod init;
mod second_order;

use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::bezier::{CompositeBezier, LinkedCurve, Mode, VariablePack, JUNCTION_TOL};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, TangentVector};
use crate::scalar::Real;

pub use grid::DiscretizationGrid;
pub use second_order::{grad_second_order_diff_sq, second_order_diff};

/// Weight of the data term: a finite `λ ≥ 0`, or infinity for
/// interpolation. In JSON a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lambda<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Lambda<T> {
    pub fn new(value: T) -> Result<Self> {
        if value.is_infinite() && value > T::zero() {
            Ok(Lambda::Infinite)
        } else if value >= T::zero() {
            Ok(Lambda::Finite(value))
        } else {
            Err(Error::Problem(format!("lambda must be non-negative, got {value}")))
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Lambda::Finite(_) => Mode::Fitting,
            Lambda::Infinite => Mode::Interpolation,
        }
    }
}

impl<T: Real> fmt::Display for Lambda<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Finite(v) => write!(f, "{v}"),
            Lambda::Infinite => f.write_str("inf"),
        }
    }
}

impl<T: Real> std::str::FromStr for Lambda<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Lambda::Infinite),
            other => {
                let v: f64 = other.parse().map_err(|_| Error::Problem(format!("cannot parse lambda {s:?}")))?;
                Lambda::new(T::lit(v))
            }
        }
    }
}

impl<T: Real> Serialize for Lambda<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Lambda::Finite(v) => s.serialize_f64(v.as_f64()),
            Lambda::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de, T: Real> Deserialize<'de> for Lambda<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(v) => Lambda::new(T::lit(v)).map_err(de::Error::custom),
            Repr::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

/// Normalisation of the second-order difference inside the MSA.
///
/// `Doubled` uses `d₂ = 2·dist(c, y)`, which reduces to `‖x − 2y + z‖` in
/// Euclidean space. `Plain` drops the factor 2, so its MSA is a quarter of
/// the doubled one; the published reference values are on this scale.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferenceScale {
    #[default]
    Doubled,
    Plain,
}

impl DifferenceScale {
    /// Factor applied to the doubled MSA.
    pub fn factor<T: Real>(self) -> T {
        match self {
            DifferenceScale::Doubled => T::one(),
            DifferenceScale::Plain => T::lit(0.25),
        }
    }
}

/// Breakdown of the objective: `total = msa + λ/2·data_term`, where
/// `data_term = Σ dist²(p_i, d_i)` (zero for interpolation).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue<T> {
    pub total: T,
    pub msa: T,
    pub data_term: T,
}

/// Data points, weight, grid and degree of a fitting or interpolation
/// problem with one segment between consecutive data points.
#[derive(Clone, Debug)]
pub struct FittingProblem<T> {
    manifold: Manifold,
    degree: usize,
    data: Vec<Point<T>>,
    lambda: Lambda<T>,
    grid: DiscretizationGrid,
    scale: DifferenceScale,
}

impl<T: Real> FittingProblem<T> {
    pub fn new(
        manifold: Manifold,
        degree: usize,
        data: Vec<Point<T>>,
        lambda: Lambda<T>,
        intervals: usize,
    ) -> Result<Self> {
        if data.len() < 2 {
            return Err(Error::Problem("data: need at least 2 points".into()));
        }
        if degree < 2 {
            return Err(Error::Problem(format!("degree: need at least 2, got {degree}")));
        }
        for (i, d) in data.iter().enumerate() {
            manifold.validate_point(d).map_err(|e| e.context(format!("data[{i}]")))?;
        }
        let grid = DiscretizationGrid::new(data.len() - 1, intervals)?;
        Ok(FittingProblem { manifold, degree, data, lambda, grid, scale: DifferenceScale::Doubled })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of segments.
    pub fn n(&self) -> usize {
        self.data.len() - 1
    }

    pub fn data(&self) -> &[Point<T>] {
        &self.data
    }

    pub fn lambda(&self) -> Lambda<T> {
        self.lambda
    }

    pub fn grid(&self) -> DiscretizationGrid {
        self.grid
    }

    pub fn mode(&self) -> Mode {
        self.lambda.mode()
    }

    pub fn with_lambda(&self, lambda: Lambda<T>) -> Self {
        FittingProblem { lambda, ..self.clone() }
    }

    pub fn difference_scale(&self) -> DifferenceScale {
        self.scale
    }

    pub fn with_difference_scale(&self, scale: DifferenceScale) -> Self {
        FittingProblem { scale, ..self.clone() }
    }

    pub fn with_grid(&self, intervals: usize) -> Result<Self> {
        Ok(FittingProblem { grid: DiscretizationGrid::new(self.n(), intervals)?, ..self.clone() })
    }

    /// Checks that `pack` has this problem's layout.
    pub fn check_pack(&self, pack: &VariablePack<T>) -> Result<()> {
        if pack.manifold != self.manifold
            || pack.n != self.n()
            || pack.degree != self.degree
            || pack.mode != self.mode()
        {
            return Err(Error::Pack(format!(
                "pack is {:?} with {} segments of degree {} on {}; problem wants {:?}, {}, {} on {}",
                pack.mode,
                pack.n,
                pack.degree,
                pack.manifold.name(),
                self.mode(),
                self.n(),
                self.degree,
                self.manifold.name()
            )));
        }
        for (i, (p, d)) in pack.fixed_junctions.iter().zip(&self.data).enumerate() {
            if self.manifold.dist(p, d)? > T::lit(JUNCTION_TOL) {
                return Err(Error::Pack(format!("fixed junction {i} differs from data point {i}")));
            }
        }
        Ok(())
    }

    /// Free variables of a given initial curve. For interpolation the
    /// junctions are replaced by the data.
    pub fn pack_curve(&self, curve: &CompositeBezier<T>) -> Result<VariablePack<T>> {
        let mut pack = VariablePack::pack(curve, self.mode())?;
        if self.mode() == Mode::Interpolation {
            pack.fixed_junctions = self.data.clone();
        }
        self.check_pack(&pack)?;
        Ok(pack)
    }

    /// Curve from data only: junctions at the data, tangents from central
    /// differences of the data.
    pub fn default_initialization(&self) -> Result<VariablePack<T>> {
        let curve = init::default_curve(self.manifold, self.degree, &self.data)?;
        self.pack_curve(&curve)
    }

    /// Samples the curve on the grid and evaluates the objective.
    pub fn evaluate(&self, pack: &VariablePack<T>) -> Result<Evaluation<T>> {
        self.check_pack(pack)?;
        let linked = pack.unpack_linked()?;
        let samples = sample(&linked.curve, self.grid)?;
        let msa = self.scale.factor::<T>() * msa_of_points(self.manifold, samples.iter(), self.grid)?;
        let data_term = match self.lambda {
            Lambda::Infinite => T::zero(),
            Lambda::Finite(_) => {
                let mut s = T::zero();
                for (i, d) in self.data.iter().enumerate() {
                    let dist = self.manifold.dist(linked.curve.junction(i), d)?;
                    s = s + dist * dist;
                }
                s
            }
        };
        let total = match self.lambda {
            Lambda::Infinite => msa,
            Lambda::Finite(l) => msa + l * T::lit(0.5) * data_term,
        };
        Ok(Evaluation { pack: pack.clone(), linked, samples, value: ObjectiveValue { total, msa, data_term } })
    }

    pub fn objective(&self, pack: &VariablePack<T>) -> Result<ObjectiveValue<T>> {
        Ok(self.evaluate(pack)?.value)
    }

    pub fn gradient(&self, pack: &VariablePack<T>) -> Result<Vec<TangentVector<T>>> {
        self.evaluate(pack)?.gradient(self)
    }

    /// Central finite differences of the objective along an orthonormal
    /// basis of each free variable's tangent space.
    pub fn finite_difference_gradient(&self, pack: &VariablePack<T>, h: T) -> Result<Vec<TangentVector<T>>> {
        let mut out = Vec::with_capacity(pack.len());
        for (i, x) in pack.points.iter().enumerate() {
            let mut g = self.manifold.zero_tangent();
            for e in self.manifold.tangent_basis(x)? {
                let shifted = |s: T| -> Result<T> {
                    let mut pts = pack.points.clone();
                    pts[i] = self.manifold.exp(x, &e.scaled(s))?;
                    Ok(self.objective(&pack.with_points(pts)?)?.total)
                };
                let c = (shifted(h)? - shifted(-h)?) / (T::lit(2.0) * h);
                g.axpy(c, &e);
            }
            out.push(g);
        }
        Ok(out)
    }
}

/// Per-variable comparison of the analytic gradient with finite differences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientCheckRow<T> {
    pub variable: usize,
    pub analytic_norm: T,
    pub fd_norm: T,
    /// `‖g_i − fd_i‖ / max_j ‖g_j‖`.
    pub rel_error: T,
}

impl<T: Real> FittingProblem<T> {
    /// Compares `gradient` with `finite_difference_gradient` at `pack`.
    ///
    /// Errors are relative to the largest analytic component, so variables
    /// with a near-zero gradient do not inflate the ratio.
    pub fn gradient_check(&self, pack: &VariablePack<T>, h: T) -> Result<Vec<GradientCheckRow<T>>> {
        let g = self.gradient(pack)?;
        let fd = self.finite_difference_gradient(pack, h)?;
        Ok(compare_gradients(&g, &fd))
    }
}

/// Rows of [`FittingProblem::gradient_check`] for given gradients.
pub fn compare_gradients<T: Real>(g: &[TangentVector<T>], fd: &[TangentVector<T>]) -> Vec<GradientCheckRow<T>> {
    let scale = g.iter().map(|v| v.norm()).fold(T::min_positive_value(), T::max);
    g.iter()
        .zip(fd)
        .enumerate()
        .map(|(i, (a, b))| GradientCheckRow {
            variable: i,
            analytic_norm: a.norm(),
            fd_norm: b.norm(),
            rel_error: (a.clone() - b.clone()).norm() / scale,
        })
        .collect()
}

/// A curve sampled on the grid together with its objective value.
#[derive(Clone, Debug)]
pub struct Evaluation<T: Real> {
    pub pack: VariablePack<T>,
    linked: LinkedCurve<T>,
    samples: Vec<Point<T>>,
    pub value: ObjectiveValue<T>,
}

impl<T: Real> Evaluation<T> {
    pub fn curve(&self) -> &CompositeBezier<T> {
        &self.linked.curve
    }

    /// Curve points at the grid parameters.
    pub fn samples(&self) -> &[Point<T>] {
        &self.samples
    }

    /// Riemannian gradient of the objective with respect to every free
    /// variable, assembled with adjoint Jacobi fields. Each grid point's
    /// cotangent is summed over its triples first, so one De Casteljau tree
    /// per grid point suffices.
    pub fn gradient(&self, problem: &FittingProblem<T>) -> Result<Vec<TangentVector<T>>> {
        let m = problem.manifold;
        let grid = problem.grid;
        let scale = problem.scale.factor::<T>() / grid.dt::<T>().powi(3);
        let mut cot = vec![m.zero_tangent(); self.samples.len()];
        for i in 1..grid.intervals() {
            let (x, y, z) = (&self.samples[i - 1], &self.samples[i], &self.samples[i + 1]);
            let g = crate::manifold::Geodesic::new(m, x, z).map_err(|e| e.context(format!("grid triple {i}")))?;
            let (_, [gx, gy, gz]) =
                second_order::d2_sq_with_grad(&g, y).map_err(|e| e.context(format!("grid triple {i}")))?;
            cot[i - 1].axpy(scale, &gx);
            cot[i].axpy(scale, &gy);
            cot[i + 1].axpy(scale, &gz);
        }
        let mut leaves = self.linked.leaf_buffer();
        for (k, nu) in cot.iter().enumerate() {
            if nu.is_zero() {
                continue;
            }
            let (seg, local) = grid.locate::<T>(k);
            let tree =
                self.linked.curve.segments()[seg].tree(m, local).map_err(|e| e.context(format!("grid point {k}")))?;
            for (acc, v) in leaves[seg].iter_mut().zip(tree.adjoint(nu)) {
                *acc += &v;
            }
        }
        let mut grad = self.linked.pull_back(leaves);
        if let Lambda::Finite(l) = problem.lambda {
            if l != T::zero() {
                for (i, d) in problem.data.iter().enumerate() {
                    let idx = self.pack.junction_index(i).expect("fitting junctions are free");
                    let log = m.log(&self.pack.points[idx], d).map_err(|e| e.context(format!("data term {i}")))?;
                    grad[idx].axpy(-l, &log);
                }
            }
        }
        Ok(grad)
    }
}

fn msa_of_points<'a, T: Real + 'a>(
    m: Manifold,
    points: impl Iterator<Item = &'a Point<T>>,
    grid: DiscretizationGrid,
) -> Result<T> {
    let pts: Vec<&Point<T>> = points.collect();
    let mut sum = T::zero();
    for i in 1..pts.len() - 1 {
        sum = sum
            + second_order::d2_sq(m, pts[i - 1], pts[i], pts[i + 1])
                .map_err(|e| e.context(format!("grid triple {i}")))?;
    }
    Ok(sum / grid.dt::<T>().powi(3))
}

/// Curve points at the grid parameters.
pub fn sample<T: Real>(curve: &CompositeBezier<T>, grid: DiscretizationGrid) -> Result<Vec<Point<T>>> {
    check_grid(curve, grid)?;
    (0..=grid.intervals())
        .map(|k| {
            let (seg, local) = grid.locate::<T>(k);
            curve.segments()[seg].decasteljau(curve.manifold(), local).map_err(|e| e.context(format!("segment {seg}")))
        })
        .collect()
}

fn check_grid<T: Real>(curve: &CompositeBezier<T>, grid: DiscretizationGrid) -> Result<()> {
    if grid.segments() != curve.n() {
        return Err(Error::Problem(format!("grid has {} segments, curve has {}", grid.segments(), curve.n())));
    }
    Ok(())
}

/// Discretised mean squared acceleration `Σ_{i=1}^{N-1} d₂²[B(t_{i-1}), B(t_i), B(t_{i+1})] / Δt³`.
pub fn msa<T: Real>(curve: &CompositeBezier<T>, grid: DiscretizationGrid) -> Result<T> {
    let pts = sample(curve, grid)?;
    msa_of_points(curve.manifold(), pts.iter(), grid)
}

/// `dist(B(t_i), B(t_{i+1})) / Δt` for `i = 0..N`.
pub fn first_order_diffs<T: Real>(curve: &CompositeBezier<T>, grid: DiscretizationGrid) -> Result<Vec<T>> {
    let pts = sample(curve, grid)?;
    let dt = grid.dt::<T>();
    pts.windows(2).map(|w| Ok(curve.manifold().dist(&w[0], &w[1])? / dt)).collect()
}
