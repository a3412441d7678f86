use super::{dot, norm, Coords, Point, TangentVector, CUT_LOCUS_TOL};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `sin(a)/a` with a series near zero.
#[inline]
pub(super) fn sinc<T: Real>(a: T) -> T {
    if a.abs() < T::lit(1e-4) {
        let a2 = a * a;
        T::one() - a2 / T::lit(6.0) + a2 * a2 / T::lit(120.0)
    } else {
        a.sin() / a
    }
}

pub(super) fn exp<T: Real>(x: &Point<T>, v: &TangentVector<T>) -> Point<T> {
    let nv = norm(&v.0);
    let (c, s) = (nv.cos(), sinc(nv));
    let mut y: Coords<T> = x.0.iter().zip(&v.0).map(|(&a, &b)| c * a + s * b).collect();
    let ny = norm(&y);
    for e in y.iter_mut() {
        *e = *e / ny;
    }
    Point(y)
}

/// Returns the component of `y` orthogonal to `x` and the angle between them.
#[inline]
fn split<T: Real>(x: &Point<T>, y: &Point<T>) -> (Coords<T>, T) {
    let c = dot(&x.0, &y.0);
    let w: Coords<T> = y.0.iter().zip(&x.0).map(|(&b, &a)| b - c * a).collect();
    let angle = norm(&w).atan2(c);
    (w, angle)
}

pub(super) fn dist<T: Real>(x: &Point<T>, y: &Point<T>) -> T {
    split(x, y).1
}

pub(super) fn log<T: Real>(x: &Point<T>, y: &Point<T>) -> Result<TangentVector<T>> {
    let (mut w, d) = split(x, y);
    if T::PI() - d < T::lit(CUT_LOCUS_TOL) {
        return Err(Error::CutLocus { distance: d.as_f64() });
    }
    let nw = norm(&w);
    if nw > T::zero() {
        let s = d / nw;
        for e in w.iter_mut() {
            *e = *e * s;
        }
    }
    Ok(TangentVector(w))
}
