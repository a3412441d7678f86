use serde::{Deserialize, Serialize};

use super::DeCasteljauTree;
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, TangentVector};
use crate::scalar::Real;

/// One Bézier segment given by its control points `b_0, …, b_K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BezierSegment<T> {
    pub points: Vec<Point<T>>,
}

impl<T: Real> BezierSegment<T> {
    pub fn new(points: Vec<Point<T>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidCurve(format!(
                "a segment needs at least 2 control points, got {}",
                points.len()
            )));
        }
        Ok(BezierSegment { points })
    }

    pub fn degree(&self) -> usize {
        self.points.len() - 1
    }

    pub fn first(&self) -> &Point<T> {
        &self.points[0]
    }

    pub fn last(&self) -> &Point<T> {
        &self.points[self.points.len() - 1]
    }

    /// De Casteljau evaluation at `t ∈ [0, 1]`.
    pub fn decasteljau(&self, manifold: Manifold, t: T) -> Result<Point<T>> {
        if t == T::zero() {
            return Ok(self.first().clone());
        }
        if t == T::one() {
            return Ok(self.last().clone());
        }
        let mut level = self.points.clone();
        for len in (1..level.len()).rev() {
            // in place: entry i only reads i and i + 1 of the previous level
            for i in 0..len {
                level[i] = manifold.geodesic(&level[i], &level[i + 1], t)?;
            }
        }
        Ok(level.swap_remove(0))
    }

    /// Evaluation that keeps every geodesic of the recursion for
    /// differentiation.
    pub fn tree(&self, manifold: Manifold, t: T) -> Result<DeCasteljauTree<T>> {
        DeCasteljauTree::new(manifold, &self.points, t)
    }

    /// `D_{b_j} β(t)[η]`, a tangent vector at `β(t)`.
    pub fn diff(&self, manifold: Manifold, t: T, j: usize, eta: &TangentVector<T>) -> Result<TangentVector<T>> {
        self.check_index(j)?;
        Ok(self.tree(manifold, t)?.diff(j, eta))
    }

    /// Adjoint of [`BezierSegment::diff`]: maps `ν` at `β(t)` to `T_{b_j}M`.
    pub fn adjoint_diff(&self, manifold: Manifold, t: T, j: usize, nu: &TangentVector<T>) -> Result<TangentVector<T>> {
        self.check_index(j)?;
        Ok(self.tree(manifold, t)?.adjoint_at(j, nu))
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j > self.degree() {
            return Err(Error::InvalidCurve(format!("control index {j} exceeds degree {}", self.degree())));
        }
        Ok(())
    }
}

/// Euclidean Bézier curve in Bernstein form, `Σ_j b_j B_{j,K}(t)`.
pub fn bernstein_eval_euclidean<T: Real>(controls: &[Vec<T>], t: T) -> Vec<T> {
    let k = controls.len() - 1;
    let dim = controls[0].len();
    let mut out = vec![T::zero(); dim];
    let s = T::one() - t;
    let mut binom = T::one();
    for (j, b) in controls.iter().enumerate() {
        if j > 0 {
            binom = binom * T::from_usize_lossy(k + 1 - j) / T::from_usize_lossy(j);
        }
        let w = binom * s.powi((k - j) as i32) * t.powi(j as i32);
        for (o, &c) in out.iter_mut().zip(b) {
            *o = *o + w * c;
        }
    }
    out
}
