use super::geodesic::jacobi_weight;
use super::{dot, Geodesic, Manifold, Point, TangentVector};
use crate::error::Result;
use crate::scalar::Real;

/// Orthonormal basis `ξ_1, …, ξ_m` of `T_xM` diagonalising the curvature
/// operator along the geodesic from `x` to `y`, with `ξ_1` the geodesic
/// direction. For a degenerate geodesic the basis is arbitrary and every
/// eigenvalue is zero.
#[derive(Clone, Debug)]
pub struct CurvatureFrame<T> {
    pub base: Point<T>,
    pub directions: Vec<TangentVector<T>>,
    pub eigenvalues: Vec<T>,
    pub geodesic_length: T,
    geodesic: Geodesic<T>,
}

impl<T: Real> CurvatureFrame<T> {
    pub fn new(manifold: Manifold, x: &Point<T>, y: &Point<T>) -> Result<Self> {
        let geodesic = Geodesic::new(manifold, x, y)?;
        let m = manifold.intrinsic_dim();
        let seed = if geodesic.is_degenerate() { Vec::new() } else { vec![geodesic.direction_at(T::zero())] };
        let directions = complete_basis(manifold, x, seed);
        let kappa = manifold.transverse_curvature::<T>();
        let eigenvalues = if geodesic.is_degenerate() {
            vec![T::zero(); m]
        } else {
            std::iter::once(T::zero()).chain(std::iter::repeat(kappa).take(m - 1)).collect()
        };
        Ok(CurvatureFrame { base: x.clone(), directions, eigenvalues, geodesic_length: geodesic.length(), geodesic })
    }

    /// `D_x g(t; ·, y)[η]` as the sum over frame directions; agrees with
    /// [`Geodesic::jacobi`].
    pub fn jacobi(&self, t: T, eta: &TangentVector<T>) -> Result<TangentVector<T>> {
        let mut out = TangentVector::zeros(eta.len());
        for (xi, &k) in self.directions.iter().zip(&self.eigenvalues) {
            let a = jacobi_weight(k, self.geodesic_length, T::one() - t)?;
            let frame_t = self.geodesic.transport(T::zero(), t, xi);
            out.axpy(dot(&eta.0, &xi.0) * a, &frame_t);
        }
        Ok(out)
    }

    /// Adjoint of [`CurvatureFrame::jacobi`]: `Σ ⟨ν, Ξ_ℓ(t)⟩ α_ℓ ξ_ℓ`.
    pub fn adjoint_jacobi(&self, t: T, nu: &TangentVector<T>) -> Result<TangentVector<T>> {
        let mut out = TangentVector::zeros(nu.len());
        for (xi, &k) in self.directions.iter().zip(&self.eigenvalues) {
            let a = jacobi_weight(k, self.geodesic_length, T::one() - t)?;
            let frame_t = self.geodesic.transport(T::zero(), t, xi);
            out.axpy(dot(&nu.0, &frame_t.0) * a, xi);
        }
        Ok(out)
    }
}

/// Extends orthonormal tangent vectors at `x` to an orthonormal basis of
/// `T_xM` by Gram-Schmidt over the standard basis, so the result is
/// reproducible.
pub(crate) fn complete_basis<T: Real>(
    manifold: Manifold,
    x: &Point<T>,
    mut directions: Vec<TangentVector<T>>,
) -> Vec<TangentVector<T>> {
    let m = manifold.intrinsic_dim();
    let len = manifold.tangent_len();
    for i in 0..len {
        if directions.len() == m {
            break;
        }
        let mut e = TangentVector::zeros(len);
        e.0[i] = T::one();
        let mut v = manifold.project_tangent(x, &e);
        for _ in 0..2 {
            for d in &directions {
                let c = dot(&v.0, &d.0);
                v.axpy(-c, d);
            }
        }
        let nv = v.norm();
        if nv > T::lit(1e-6) {
            directions.push(v.scaled(T::one() / nv));
        }
    }
    directions
}
