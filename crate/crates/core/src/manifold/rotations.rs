//! SO(3) with left-trivialised tangents: `V = x·ω̂` is stored as `ω`.

use super::sphere::sinc;
use super::{Point, TangentVector, CUT_LOCUS_TOL};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) type Mat3<T> = [T; 9];
pub(crate) type Vec3<T> = [T; 3];

pub(crate) fn identity<T: Real>() -> Mat3<T> {
    let (o, z) = (T::one(), T::zero());
    [o, z, z, z, o, z, z, z, o]
}

pub(crate) fn as_matrix<T: Real>(c: &[T]) -> Mat3<T> {
    let mut m = [T::zero(); 9];
    m.copy_from_slice(&c[..9]);
    m
}

#[inline]
fn as_vec3<T: Real>(c: &[T]) -> Vec3<T> {
    [c[0], c[1], c[2]]
}

pub(crate) fn mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut c = [T::zero(); 9];
    for i in 0..3 {
        for j in 0..3 {
            c[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
        }
    }
    c
}

/// `aᵀ·b`
pub(crate) fn tmul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut c = [T::zero(); 9];
    for i in 0..3 {
        for j in 0..3 {
            c[3 * i + j] = a[i] * b[j] + a[3 + i] * b[3 + j] + a[6 + i] * b[6 + j];
        }
    }
    c
}

pub(crate) fn det<T: Real>(m: &Mat3<T>) -> T {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
}

/// `‖mᵀm − I‖_F`
pub(crate) fn orthogonality_defect<T: Real>(m: &Mat3<T>) -> T {
    let g = tmul(m, m);
    let id = identity::<T>();
    g.iter().zip(&id).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt()
}

/// Gram–Schmidt on the rows.
pub(crate) fn orthonormalize<T: Real>(m: &Mat3<T>) -> Mat3<T> {
    let mut r0 = [m[0], m[1], m[2]];
    let n0 = norm3(&r0);
    r0 = scale3(&r0, T::one() / n0);
    let mut r1 = [m[3], m[4], m[5]];
    let d = dot3(&r0, &r1);
    r1 = [r1[0] - d * r0[0], r1[1] - d * r0[1], r1[2] - d * r0[2]];
    let n1 = norm3(&r1);
    r1 = scale3(&r1, T::one() / n1);
    let r2 = cross(&r0, &r1);
    [r0[0], r0[1], r0[2], r1[0], r1[1], r1[2], r2[0], r2[1], r2[2]]
}

#[inline]
pub(crate) fn dot3<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm3<T: Real>(a: &Vec3<T>) -> T {
    dot3(a, a).sqrt()
}

#[inline]
fn scale3<T: Real>(a: &Vec3<T>, s: T) -> Vec3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub(crate) fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn hat<T: Real>(w: &Vec3<T>) -> Mat3<T> {
    let z = T::zero();
    [z, -w[2], w[1], w[2], z, -w[0], -w[1], w[0], z]
}

/// Matrix exponential of `ŵ` (Rodrigues).
pub(crate) fn expm<T: Real>(w: &Vec3<T>) -> Mat3<T> {
    let th2 = dot3(w, w);
    let th = th2.sqrt();
    let a = sinc(th);
    let b = if th < T::lit(1e-4) {
        T::lit(0.5) - th2 / T::lit(24.0) + th2 * th2 / T::lit(720.0)
    } else {
        (T::one() - th.cos()) / th2
    };
    let k = hat(w);
    let k2 = mul(&k, &k);
    let mut r = identity::<T>();
    for i in 0..9 {
        r[i] = r[i] + a * k[i] + b * k2[i];
    }
    r
}

/// Rotates `v` by the rotation `exp(ŵ)`.
#[inline]
pub(crate) fn rotate<T: Real>(w: &Vec3<T>, v: &Vec3<T>) -> Vec3<T> {
    let th = norm3(w);
    if th == T::zero() {
        return *v;
    }
    let k = scale3(w, T::one() / th);
    let (c, s) = (th.cos(), th.sin());
    let kv = cross(&k, v);
    let kd = dot3(&k, v) * (T::one() - c);
    [v[0] * c + kv[0] * s + k[0] * kd, v[1] * c + kv[1] * s + k[1] * kd, v[2] * c + kv[2] * s + k[2] * kd]
}

/// Axis-angle vector of a rotation matrix and its angle in `[0, π]`.
pub(crate) fn logm<T: Real>(r: &Mat3<T>) -> (Vec3<T>, T) {
    let half = T::lit(0.5);
    let s = [(r[7] - r[5]) * half, (r[2] - r[6]) * half, (r[3] - r[1]) * half];
    let sin_th = norm3(&s);
    let cos_th = ((r[0] + r[4] + r[8]) - T::one()) * half;
    let th = sin_th.atan2(cos_th);
    if cos_th >= T::zero() {
        // θ/sinθ is well conditioned away from π
        let f = if sin_th < T::lit(1e-4) {
            let t2 = th * th;
            T::one() + t2 / T::lit(6.0) + T::lit(7.0) * t2 * t2 / T::lit(360.0)
        } else {
            th / sin_th
        };
        return (scale3(&s, f), th);
    }
    // Near π the skew part vanishes; read the axis off the symmetric part
    // (1 − cosθ)·n·nᵀ and fix the sign with the skew part.
    let b = |i: usize, j: usize| (r[3 * i + j] + r[3 * j + i]) * half - if i == j { cos_th } else { T::zero() };
    let k = (0..3).max_by(|&i, &j| b(i, i).partial_cmp(&b(j, j)).unwrap()).unwrap();
    let mut n = [b(0, k), b(1, k), b(2, k)];
    let nn = norm3(&n);
    n = scale3(&n, T::one() / nn);
    if dot3(&n, &s) < T::zero() {
        n = scale3(&n, -T::one());
    }
    (scale3(&n, th), th)
}

pub(super) fn exp<T: Real>(x: &Point<T>, v: &TangentVector<T>) -> Point<T> {
    let xm = as_matrix(&x.0);
    let e = expm(&as_vec3(&v.0));
    Point(mul(&xm, &e).iter().copied().collect())
}

pub(super) fn log<T: Real>(x: &Point<T>, y: &Point<T>) -> Result<TangentVector<T>> {
    let r = tmul(&as_matrix(&x.0), &as_matrix(&y.0));
    let (w, th) = logm(&r);
    if T::PI() - th < T::lit(CUT_LOCUS_TOL) {
        return Err(Error::CutLocus { distance: th.as_f64() });
    }
    Ok(TangentVector(w.iter().copied().collect()))
}

pub(super) fn dist<T: Real>(x: &Point<T>, y: &Point<T>) -> T {
    let r = tmul(&as_matrix(&x.0), &as_matrix(&y.0));
    logm(&r).1
}
