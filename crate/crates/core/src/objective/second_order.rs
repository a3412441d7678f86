use crate::error::Result;
use crate::manifold::{Geodesic, Manifold, Point, TangentVector};
use crate::scalar::Real;

/// `d₂[x, y, z] = 2·dist(c, y)` with `c` the midpoint of the shortest
/// geodesic from `x` to `z`.
pub fn second_order_diff<T: Real>(m: Manifold, x: &Point<T>, y: &Point<T>, z: &Point<T>) -> Result<T> {
    let c = m.geodesic(x, z, T::lit(0.5))?;
    Ok(T::lit(2.0) * m.dist(&c, y)?)
}

/// Gradient of `d₂²[x, y, z] = 4·dist²(c, y)` with respect to each argument.
pub fn grad_second_order_diff_sq<T: Real>(
    m: Manifold,
    x: &Point<T>,
    y: &Point<T>,
    z: &Point<T>,
) -> Result<[TangentVector<T>; 3]> {
    m.check_point(y)?;
    let g = Geodesic::new(m, x, z)?;
    let (_, grads) = d2_sq_with_grad(&g, y)?;
    Ok(grads)
}

/// `d₂²` and its gradient, reusing the geodesic `x → z`.
pub(crate) fn d2_sq_with_grad<T: Real>(g: &Geodesic<T>, y: &Point<T>) -> Result<(T, [TangentVector<T>; 3])> {
    let m = g.manifold();
    let half = T::lit(0.5);
    let c = g.point(half);
    let log_cy = m.log_unchecked(&c, y)?;
    let log_yc = m.log_unchecked(y, &c)?;
    let eight = T::lit(8.0);
    let d_sq = log_cy.dot(&log_cy);
    let grad_c = log_cy.scaled(-eight);
    let gx = g.adjoint_jacobi(half, &grad_c);
    let gz = g.adjoint_jacobi_reversed(half, &grad_c);
    Ok((T::lit(4.0) * d_sq, [gx, log_yc.scaled(-eight), gz]))
}

/// `d₂²` alone, for objective evaluations.
pub(crate) fn d2_sq<T: Real>(m: Manifold, x: &Point<T>, y: &Point<T>, z: &Point<T>) -> Result<T> {
    let c = m.geodesic(x, z, T::lit(0.5))?;
    let d = m.dist_unchecked(&c, y);
    Ok(T::lit(4.0) * d * d)
}
