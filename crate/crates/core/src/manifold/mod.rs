//! Closed-form Riemannian primitives on three symmetric manifolds.
//!
//! Points and tangent vectors are plain coordinate arrays; the [`Manifold`]
//! descriptor interprets them:
//!
//! | kind           | point coords            | tangent coords            | inner product |
//! |----------------|-------------------------|---------------------------|---------------|
//! | `Euclidean(m)` | `m` reals               | `m` reals                 | dot product   |
//! | `Sphere(m)`    | unit vector in `m+1`    | ambient vector ⟂ base     | dot product   |
//! | `Rotations3`   | 3×3 matrix, row-major   | axis form `ω`, `V = x·ω̂`  | `½tr(UᵀV)`    |
//!
//! With the axis form the rotation metric `½tr(UᵀV)` reduces to the dot
//! product of the axis vectors, so `dist(I, R(θ)) = θ` and the sectional
//! curvature of the group is `1/4`.

mod frame;
mod geodesic;
pub(crate) mod rotations;
mod sphere;

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use frame::CurvatureFrame;
pub use geodesic::Geodesic;

/// Inline storage large enough for every built-in manifold of small dimension.
pub type Coords<T> = SmallVec<[T; 9]>;

/// Distances at or below this are treated as a degenerate (constant) geodesic.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Distance to the cut locus below which the logarithm is refused.
pub const CUT_LOCUS_TOL: f64 = 1e-9;
/// `|sin(d√κ)|` below this marks a conjugate point.
pub const CONJUGATE_TOL: f64 = 1e-12;

/// Which manifold the coordinates live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Manifold {
    /// `R^dim`.
    Euclidean { dim: usize },
    /// The unit sphere `S^dim` embedded in `R^(dim+1)`.
    Sphere { dim: usize },
    /// The rotation group SO(3).
    Rotations3,
}

impl Manifold {
    pub fn euclidean(dim: usize) -> Self {
        Manifold::Euclidean { dim }
    }

    pub fn sphere(dim: usize) -> Self {
        Manifold::Sphere { dim }
    }

    /// Number of reals in a point's coordinates.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            Manifold::Euclidean { dim } => dim,
            Manifold::Sphere { dim } => dim + 1,
            Manifold::Rotations3 => 9,
        }
    }

    pub fn intrinsic_dim(&self) -> usize {
        match *self {
            Manifold::Euclidean { dim } | Manifold::Sphere { dim } => dim,
            Manifold::Rotations3 => 3,
        }
    }

    /// Number of reals in a tangent vector's coordinates.
    pub fn tangent_len(&self) -> usize {
        match *self {
            Manifold::Euclidean { dim } => dim,
            Manifold::Sphere { dim } => dim + 1,
            Manifold::Rotations3 => 3,
        }
    }

    pub fn injectivity_radius<T: Real>(&self) -> T {
        match self {
            Manifold::Euclidean { .. } => T::infinity(),
            Manifold::Sphere { .. } | Manifold::Rotations3 => T::PI(),
        }
    }

    /// Eigenvalue of the curvature operator on directions orthogonal to a
    /// geodesic. The geodesic direction itself always has eigenvalue zero.
    pub fn transverse_curvature<T: Real>(&self) -> T {
        match self {
            Manifold::Euclidean { .. } => T::zero(),
            Manifold::Sphere { .. } => T::one(),
            Manifold::Rotations3 => T::lit(0.25),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Manifold::Euclidean { dim } => format!("R^{dim}"),
            Manifold::Sphere { dim } => format!("S^{dim}"),
            Manifold::Rotations3 => "SO(3)".to_string(),
        }
    }

    pub(crate) fn check_point<T>(&self, x: &Point<T>) -> Result<()> {
        let expected = self.ambient_dim();
        if x.0.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: x.0.len() });
        }
        Ok(())
    }

    pub(crate) fn check_tangent<T>(&self, v: &TangentVector<T>) -> Result<()> {
        let expected = self.tangent_len();
        if v.0.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: v.0.len() });
        }
        Ok(())
    }

    /// Checks the point invariants: unit norm on the sphere, orthogonality
    /// and positive determinant for rotations.
    pub fn validate_point<T: Real>(&self, x: &Point<T>) -> Result<()> {
        self.check_point(x)?;
        if x.0.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        match self {
            Manifold::Euclidean { .. } => Ok(()),
            Manifold::Sphere { .. } => {
                let dev = (norm(&x.0) - T::one()).abs();
                if dev > T::lit(1e-12) {
                    return Err(Error::InvalidPoint(format!("sphere point has norm deviation {dev}")));
                }
                Ok(())
            }
            Manifold::Rotations3 => {
                let r = rotations::as_matrix(&x.0);
                let dev = rotations::orthogonality_defect(&r);
                if dev > T::lit(1e-10) {
                    return Err(Error::InvalidPoint(format!("rotation has orthogonality defect {dev}")));
                }
                if rotations::det(&r) <= T::zero() {
                    return Err(Error::InvalidPoint("rotation has non-positive determinant".into()));
                }
                Ok(())
            }
        }
    }

    /// Projects an approximately valid point onto the manifold, refusing
    /// inputs further than `tol` away.
    pub fn normalize_point<T: Real>(&self, x: &Point<T>, tol: T) -> Result<Point<T>> {
        self.check_point(x)?;
        match self {
            Manifold::Euclidean { .. } => Ok(x.clone()),
            Manifold::Sphere { .. } => {
                let nx = norm(&x.0);
                if (nx - T::one()).abs() > tol {
                    return Err(Error::InvalidPoint(format!("sphere point has norm {nx}")));
                }
                Ok(Point(x.0.iter().map(|&c| c / nx).collect()))
            }
            Manifold::Rotations3 => {
                let r = rotations::as_matrix(&x.0);
                if rotations::orthogonality_defect(&r) > tol || rotations::det(&r) <= T::zero() {
                    return Err(Error::InvalidPoint("matrix is not close to a rotation".into()));
                }
                Ok(Point(rotations::orthonormalize(&r).iter().copied().collect()))
            }
        }
    }

    pub fn validate_tangent<T: Real>(&self, x: &Point<T>, v: &TangentVector<T>) -> Result<()> {
        self.check_point(x)?;
        self.check_tangent(v)?;
        if let Manifold::Sphere { .. } = self {
            let d = dot(&x.0, &v.0).abs();
            if d > T::lit(1e-10) {
                return Err(Error::InvalidTangent(format!("vector has normal component {d}")));
            }
        }
        Ok(())
    }

    pub fn zero_tangent<T: Real>(&self) -> TangentVector<T> {
        TangentVector::zeros(self.tangent_len())
    }

    /// Exponential map `Exp_x[v]`.
    pub fn exp<T: Real>(&self, x: &Point<T>, v: &TangentVector<T>) -> Result<Point<T>> {
        self.check_point(x)?;
        self.check_tangent(v)?;
        Ok(self.exp_unchecked(x, v))
    }

    pub(crate) fn exp_unchecked<T: Real>(&self, x: &Point<T>, v: &TangentVector<T>) -> Point<T> {
        match self {
            Manifold::Euclidean { .. } => Point(x.0.iter().zip(&v.0).map(|(&a, &b)| a + b).collect()),
            Manifold::Sphere { .. } => sphere::exp(x, v),
            Manifold::Rotations3 => rotations::exp(x, v),
        }
    }

    /// Logarithmic map `Log_x[y]`; fails on the cut locus.
    pub fn log<T: Real>(&self, x: &Point<T>, y: &Point<T>) -> Result<TangentVector<T>> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.log_unchecked(x, y)
    }

    pub(crate) fn log_unchecked<T: Real>(&self, x: &Point<T>, y: &Point<T>) -> Result<TangentVector<T>> {
        match self {
            Manifold::Euclidean { .. } => Ok(TangentVector(y.0.iter().zip(&x.0).map(|(&a, &b)| a - b).collect())),
            Manifold::Sphere { .. } => sphere::log(x, y),
            Manifold::Rotations3 => rotations::log(x, y),
        }
    }

    /// Geodesic distance. Unlike [`Manifold::log`] this is defined
    /// everywhere, including antipodal points.
    pub fn dist<T: Real>(&self, x: &Point<T>, y: &Point<T>) -> Result<T> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.dist_unchecked(x, y))
    }

    pub(crate) fn dist_unchecked<T: Real>(&self, x: &Point<T>, y: &Point<T>) -> T {
        match self {
            Manifold::Euclidean { .. } => x.0.iter().zip(&y.0).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt(),
            Manifold::Sphere { .. } => sphere::dist(x, y),
            Manifold::Rotations3 => rotations::dist(x, y),
        }
    }

    /// `g(t; x, y) = Exp_x[t·Log_x y]`; any real `t` is allowed.
    pub fn geodesic<T: Real>(&self, x: &Point<T>, y: &Point<T>, t: T) -> Result<Point<T>> {
        let v = self.log(x, y)?;
        Ok(self.exp_unchecked(x, &v.scaled(t)))
    }

    /// Riemannian inner product. With the chosen coordinates this is the
    /// Euclidean dot product of the tangent coordinates for every kind.
    pub fn inner<T: Real>(&self, x: &Point<T>, u: &TangentVector<T>, v: &TangentVector<T>) -> Result<T> {
        self.check_point(x)?;
        self.check_tangent(u)?;
        self.check_tangent(v)?;
        Ok(dot(&u.0, &v.0))
    }

    pub fn norm<T: Real>(&self, x: &Point<T>, v: &TangentVector<T>) -> Result<T> {
        Ok(self.inner(x, v, v)?.sqrt())
    }

    /// Parallel transport of `v ∈ T_xM` along the shortest geodesic to `y`.
    pub fn parallel_transport<T: Real>(
        &self,
        x: &Point<T>,
        y: &Point<T>,
        v: &TangentVector<T>,
    ) -> Result<TangentVector<T>> {
        self.check_tangent(v)?;
        let g = Geodesic::new(*self, x, y)?;
        Ok(g.transport(T::zero(), T::one(), v))
    }

    /// Orthonormal basis of `T_xM` diagonalising the curvature operator along
    /// the geodesic from `x` to `y`.
    pub fn curvature_frame<T: Real>(&self, x: &Point<T>, y: &Point<T>) -> Result<CurvatureFrame<T>> {
        CurvatureFrame::new(*self, x, y)
    }

    /// A fixed orthonormal basis of `T_xM`.
    pub fn tangent_basis<T: Real>(&self, x: &Point<T>) -> Result<Vec<TangentVector<T>>> {
        self.check_point(x)?;
        Ok(frame::complete_basis(*self, x, Vec::new()))
    }

    /// `D_x g(t; ·, y)[η]`, a tangent vector at `g(t; x, y)`.
    pub fn jacobi_field<T: Real>(
        &self,
        x: &Point<T>,
        y: &Point<T>,
        t: T,
        eta: &TangentVector<T>,
    ) -> Result<TangentVector<T>> {
        self.check_tangent(eta)?;
        Ok(Geodesic::new(*self, x, y)?.jacobi(t, eta))
    }

    /// `D_y g(t; x, ·)[η]` for `η ∈ T_yM`, a tangent vector at `g(t; x, y)`.
    pub fn jacobi_field_reversed<T: Real>(
        &self,
        x: &Point<T>,
        y: &Point<T>,
        t: T,
        eta: &TangentVector<T>,
    ) -> Result<TangentVector<T>> {
        self.check_tangent(eta)?;
        Ok(Geodesic::new(*self, x, y)?.jacobi_reversed(t, eta))
    }

    /// Adjoint of [`Manifold::jacobi_field`]: maps `ν` at `g(t; x, y)` to `T_xM`.
    pub fn adjoint_jacobi_field<T: Real>(
        &self,
        x: &Point<T>,
        y: &Point<T>,
        t: T,
        nu: &TangentVector<T>,
    ) -> Result<TangentVector<T>> {
        self.check_tangent(nu)?;
        Ok(Geodesic::new(*self, x, y)?.adjoint_jacobi(t, nu))
    }

    /// Adjoint of [`Manifold::jacobi_field_reversed`]: maps `ν` at
    /// `g(t; x, y)` to `T_yM`.
    pub fn adjoint_jacobi_field_reversed<T: Real>(
        &self,
        x: &Point<T>,
        y: &Point<T>,
        t: T,
        nu: &TangentVector<T>,
    ) -> Result<TangentVector<T>> {
        self.check_tangent(nu)?;
        Ok(Geodesic::new(*self, x, y)?.adjoint_jacobi_reversed(t, nu))
    }

    /// Identity element used when a canonical point is needed.
    pub fn base_point<T: Real>(&self) -> Point<T> {
        match *self {
            Manifold::Euclidean { dim } => Point(smallvec::smallvec![T::zero(); dim]),
            Manifold::Sphere { dim } => {
                let mut c: Coords<T> = smallvec::smallvec![T::zero(); dim + 1];
                c[dim] = T::one();
                Point(c)
            }
            Manifold::Rotations3 => Point(rotations::identity::<T>().iter().copied().collect()),
        }
    }

    /// Projects ambient coordinates onto `T_xM` (only the sphere has a
    /// normal component to remove).
    pub fn project_tangent<T: Real>(&self, x: &Point<T>, v: &TangentVector<T>) -> TangentVector<T> {
        match self {
            Manifold::Sphere { .. } => {
                let c = dot(&x.0, &v.0);
                TangentVector(v.0.iter().zip(&x.0).map(|(&a, &b)| a - c * b).collect())
            }
            _ => v.clone(),
        }
    }
}

/// A point on a manifold, stored by its coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<T>(Coords<T>);

impl<T: Copy> Point<T> {
    pub fn new(coords: impl IntoIterator<Item = T>) -> Self {
        Point(coords.into_iter().collect())
    }

    pub fn from_slice(coords: &[T]) -> Self {
        Point(coords.iter().copied().collect())
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tangent coordinates (ambient for Euclidean/sphere, axis form for rotations).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TangentVector<T>(Coords<T>);

impl<T: Real> TangentVector<T> {
    pub fn new(coords: impl IntoIterator<Item = T>) -> Self {
        TangentVector(coords.into_iter().collect())
    }

    pub fn from_slice(coords: &[T]) -> Self {
        TangentVector(coords.iter().copied().collect())
    }

    pub fn zeros(len: usize) -> Self {
        TangentVector(smallvec::smallvec![T::zero(); len])
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, s: T) -> Self {
        TangentVector(self.0.iter().map(|&c| c * s).collect())
    }

    /// `self += s·other`
    #[inline]
    pub fn axpy(&mut self, s: T, other: &Self) {
        for (a, &b) in self.0.iter_mut().zip(&other.0) {
            *a = *a + s * b;
        }
    }

    pub fn dot(&self, other: &Self) -> T {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

impl<T: Real> Add for TangentVector<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<T: Real> AddAssign<&TangentVector<T>> for TangentVector<T> {
    fn add_assign(&mut self, rhs: &Self) {
        for (a, &b) in self.0.iter_mut().zip(&rhs.0) {
            *a = *a + b;
        }
    }
}

impl<T: Real> Sub for TangentVector<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= &rhs;
        self
    }
}

impl<T: Real> SubAssign<&TangentVector<T>> for TangentVector<T> {
    fn sub_assign(&mut self, rhs: &Self) {
        for (a, &b) in self.0.iter_mut().zip(&rhs.0) {
            *a = *a - b;
        }
    }
}

impl<T: Real> Neg for TangentVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        TangentVector(self.0.iter().map(|&c| -c).collect())
    }
}

impl<T: Real> Mul<T> for TangentVector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scaled(s)
    }
}

/// A tangent vector together with its base point; the JSON form of a
/// tangent vector is `{"base": [...], "vec": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasedTangent<T> {
    pub base: Point<T>,
    pub vec: TangentVector<T>,
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
