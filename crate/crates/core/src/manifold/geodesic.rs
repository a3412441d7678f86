use super::rotations;
use super::{dot, Coords, Manifold, Point, TangentVector, CONJUGATE_TOL, DEGENERATE_TOL};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Weight of a Jacobi field along a direction with curvature eigenvalue
/// `kappa` on a geodesic of length `length`, evaluated at fraction `s`:
/// `sin(d·s·√κ)/sin(d·√κ)`, its hyperbolic analogue, or `s` when flat.
///
/// The forward field (start point varied) uses `s = 1 − t`, the reversed
/// field (end point varied) uses `s = t`.
pub fn jacobi_weight<T: Real>(kappa: T, length: T, s: T) -> Result<T> {
    if kappa > T::zero() && length > T::lit(DEGENERATE_TOL) {
        let r = kappa.sqrt() * length;
        let den = r.sin();
        if den.abs() <= T::lit(CONJUGATE_TOL) {
            return Err(Error::Conjugate { length: length.as_f64() });
        }
        Ok((r * s).sin() / den)
    } else if kappa < T::zero() && length > T::lit(DEGENERATE_TOL) {
        let r = (-kappa).sqrt() * length;
        Ok((r * s).sinh() / r.sinh())
    } else {
        Ok(s)
    }
}

/// A shortest geodesic `g(·; x, y)` with its logarithm cached, so that points,
/// parallel transport and the closed-form Jacobi fields along it can be
/// evaluated repeatedly.
///
/// On all supported manifolds the curvature operator along a geodesic has
/// eigenvalue `0` on the geodesic direction and one common eigenvalue `κ` on
/// its orthogonal complement. A Jacobi field therefore splits into a part
/// along the direction and a transported remainder, which avoids building an
/// orthonormal frame; [`super::CurvatureFrame`] gives the frame-based form.
#[derive(Clone, Debug)]
pub struct Geodesic<T> {
    manifold: Manifold,
    start: Point<T>,
    log: TangentVector<T>,
    length: T,
    /// Unit direction at the start point, zero if degenerate.
    dir: TangentVector<T>,
    kappa: T,
}

impl<T: Real> Geodesic<T> {
    pub fn new(manifold: Manifold, x: &Point<T>, y: &Point<T>) -> Result<Self> {
        manifold.check_point(x)?;
        manifold.check_point(y)?;
        let log = manifold.log_unchecked(x, y)?;
        Self::from_log(manifold, x.clone(), log)
    }

    /// The geodesic `t ↦ Exp_x[t·v]` for `v` inside the injectivity domain.
    pub fn from_log(manifold: Manifold, start: Point<T>, log: TangentVector<T>) -> Result<Self> {
        let length = log.norm();
        let degenerate = length <= T::lit(DEGENERATE_TOL);
        let kappa = if degenerate { T::zero() } else { manifold.transverse_curvature() };
        // fails early on a conjugate endpoint
        jacobi_weight(kappa, length, T::zero())?;
        let dir = if degenerate { TangentVector::zeros(log.len()) } else { log.scaled(T::one() / length) };
        Ok(Geodesic { manifold, start, log, length, dir, kappa })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn start(&self) -> &Point<T> {
        &self.start
    }

    pub fn log(&self) -> &TangentVector<T> {
        &self.log
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn is_degenerate(&self) -> bool {
        self.length <= T::lit(DEGENERATE_TOL)
    }

    /// `g(t)`; `t` may lie outside `[0, 1]`.
    pub fn point(&self, t: T) -> Point<T> {
        self.manifold.exp_unchecked(&self.start, &self.log.scaled(t))
    }

    /// Unit tangent of the geodesic at `g(s)` (zero if degenerate).
    pub fn direction_at(&self, s: T) -> TangentVector<T> {
        match self.manifold {
            Manifold::Sphere { .. } if !self.is_degenerate() => {
                let a = s * self.length;
                let (sn, cs) = (a.sin(), a.cos());
                TangentVector(self.start.0.iter().zip(&self.dir.0).map(|(&x, &u)| cs * u - sn * x).collect())
            }
            _ => self.dir.clone(),
        }
    }

    /// Parallel transport of `w ∈ T_{g(from)}M` to `T_{g(to)}M` along the geodesic.
    pub fn transport(&self, from: T, to: T, w: &TangentVector<T>) -> TangentVector<T> {
        if self.is_degenerate() || from == to {
            return w.clone();
        }
        match self.manifold {
            Manifold::Euclidean { .. } => w.clone(),
            Manifold::Sphere { .. } => {
                let a = from * self.length;
                let (sn, cs) = (a.sin(), a.cos());
                let delta = (to - from) * self.length;
                let (dsn, dcs) = (delta.sin(), delta.cos());
                // position and unit velocity at g(from)
                let mut wu = T::zero();
                let mut pu: Coords<T> = Coords::with_capacity(w.len());
                let mut vu: Coords<T> = Coords::with_capacity(w.len());
                for ((&x, &u), &wi) in self.start.0.iter().zip(&self.dir.0).zip(&w.0) {
                    let p = cs * x + sn * u;
                    let v = cs * u - sn * x;
                    wu = wu + wi * v;
                    pu.push(p);
                    vu.push(v);
                }
                let cu = wu * (dcs - T::one());
                let cp = -wu * dsn;
                TangentVector(w.0.iter().zip(pu.iter().zip(&vu)).map(|(&wi, (&p, &v))| wi + cu * v + cp * p).collect())
            }
            Manifold::Rotations3 => {
                let f = -(to - from) * T::lit(0.5);
                let axis = [self.log.0[0] * f, self.log.0[1] * f, self.log.0[2] * f];
                let r = rotations::rotate(&axis, &[w.0[0], w.0[1], w.0[2]]);
                TangentVector(r.iter().copied().collect())
            }
        }
    }

    /// Forward weights `(along, across)` at `t` for the geodesic direction
    /// and its orthogonal complement.
    fn weights(&self, t: T) -> (T, T) {
        let s = T::one() - t;
        (s, jacobi_weight(self.kappa, self.length, s).expect("checked at construction"))
    }

    fn weights_reversed(&self, t: T) -> (T, T) {
        (t, jacobi_weight(self.kappa, self.length, t).expect("checked at construction"))
    }

    /// `D_x g(t; ·, y)[η]` for `η ∈ T_xM`; lives at `g(t)`.
    pub fn jacobi(&self, t: T, eta: &TangentVector<T>) -> TangentVector<T> {
        let (along, across) = self.weights(t);
        let mut out = self.transport(T::zero(), t, eta).scaled(across);
        if along != across {
            let a = dot(&eta.0, &self.dir.0);
            out.axpy((along - across) * a, &self.direction_at(t));
        }
        out
    }

    /// `D_y g(t; x, ·)[η]` for `η ∈ T_yM`; lives at `g(t)`.
    pub fn jacobi_reversed(&self, t: T, eta: &TangentVector<T>) -> TangentVector<T> {
        let (along, across) = self.weights_reversed(t);
        let mut out = self.transport(T::one(), t, eta).scaled(across);
        if along != across {
            let a = dot(&eta.0, &self.direction_at(T::one()).0);
            out.axpy((along - across) * a, &self.direction_at(t));
        }
        out
    }

    /// Adjoint of [`Geodesic::jacobi`]: `ν ∈ T_{g(t)}M` to `T_xM`.
    pub fn adjoint_jacobi(&self, t: T, nu: &TangentVector<T>) -> TangentVector<T> {
        let (along, across) = self.weights(t);
        let mut out = self.transport(t, T::zero(), nu).scaled(across);
        if along != across {
            let b = dot(&nu.0, &self.direction_at(t).0);
            out.axpy((along - across) * b, &self.dir);
        }
        out
    }

    /// Adjoint of [`Geodesic::jacobi_reversed`]: `ν ∈ T_{g(t)}M` to `T_yM`.
    pub fn adjoint_jacobi_reversed(&self, t: T, nu: &TangentVector<T>) -> TangentVector<T> {
        let (along, across) = self.weights_reversed(t);
        let mut out = self.transport(t, T::one(), nu).scaled(across);
        if along != across {
            let b = dot(&nu.0, &self.direction_at(t).0);
            out.axpy((along - across) * b, &self.direction_at(T::one()));
        }
        out
    }
}
