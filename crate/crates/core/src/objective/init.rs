use crate::bezier::{BezierSegment, CompositeBezier};
use crate::error::Result;
use crate::manifold::{Manifold, Point, TangentVector};
use crate::scalar::Real;

/// Velocity estimate at each data point: half the difference of the logs to
/// the neighbours, one-sided at the ends.
fn tangents<T: Real>(m: Manifold, data: &[Point<T>]) -> Result<Vec<TangentVector<T>>> {
    let n = data.len() - 1;
    (0..=n)
        .map(|i| {
            let ctx = |e: crate::Error| e.context(format!("initial tangent at data[{i}]"));
            if i == 0 {
                m.log(&data[0], &data[1]).map_err(ctx)
            } else if i == n {
                Ok(-m.log(&data[n], &data[n - 1]).map_err(ctx)?)
            } else {
                let fwd = m.log(&data[i], &data[i + 1]).map_err(ctx)?;
                let bwd = m.log(&data[i], &data[i - 1]).map_err(ctx)?;
                Ok((fwd - bwd).scaled(T::lit(0.5)))
            }
        })
        .collect()
}

/// C¹ curve through the data with `b_i^± = Exp_{p_i}(±w_i/K)`, so the curve
/// velocity at `p_i` is `w_i`, and any further control points spread evenly
/// along the geodesic `b_i^+ → b_{i+1}^-`.
pub(super) fn default_curve<T: Real>(m: Manifold, k: usize, data: &[Point<T>]) -> Result<CompositeBezier<T>> {
    let w = tangents(m, data)?;
    let inv_k = T::one() / T::from_usize_lossy(k);
    let mut segments = Vec::with_capacity(data.len() - 1);
    for s in 0..data.len() - 1 {
        let plus = m.exp(&data[s], &w[s].scaled(inv_k))?;
        let minus = m.exp(&data[s + 1], &w[s + 1].scaled(-inv_k))?;
        let mut pts = Vec::with_capacity(k + 1);
        pts.push(data[s].clone());
        if k == 2 {
            // one inner point; later segments get it from the C¹ reflection
            pts.push(plus);
        } else {
            for j in 1..k {
                let f = T::from_usize_lossy(j - 1) / T::from_usize_lossy(k - 2);
                let p = if j == 1 {
                    plus.clone()
                } else if j == k - 1 {
                    minus.clone()
                } else {
                    m.geodesic(&plus, &minus, f)?
                };
                pts.push(p);
            }
        }
        pts.push(data[s + 1].clone());
        segments.push(BezierSegment::new(pts)?);
    }
    CompositeBezier::new(m, segments)?.enforce_c1()
}
