use crate::error::Result;
use crate::manifold::{Geodesic, Manifold, Point, TangentVector};
use crate::scalar::Real;

/// The full De Casteljau recursion of one segment at one parameter.
///
/// `nodes[k][i]` is the geodesic from `x_i^[k]` to `x_{i+1}^[k]`, so that
/// `x_i^[k+1]` is its point at `t`. Building the tree once lets the forward
/// and adjoint differentials for every control point share it.
#[derive(Clone, Debug)]
pub struct DeCasteljauTree<T> {
    t: T,
    nodes: Vec<Vec<Geodesic<T>>>,
    point: Point<T>,
}

impl<T: Real> DeCasteljauTree<T> {
    pub fn new(manifold: Manifold, controls: &[Point<T>], t: T) -> Result<Self> {
        let degree = controls.len() - 1;
        let mut nodes = Vec::with_capacity(degree);
        let mut level: Vec<Point<T>> = controls.to_vec();
        while level.len() > 1 {
            let mut geos = Vec::with_capacity(level.len() - 1);
            let mut next = Vec::with_capacity(level.len() - 1);
            for w in level.windows(2) {
                let g = Geodesic::new(manifold, &w[0], &w[1])?;
                next.push(g.point(t));
                geos.push(g);
            }
            nodes.push(geos);
            level = next;
        }
        let point = level.pop().expect("non-empty control polygon");
        Ok(DeCasteljauTree { t, nodes, point })
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// The curve point `β(t)`.
    pub fn point(&self) -> &Point<T> {
        &self.point
    }

    /// Forward differential with respect to control point `j`.
    pub fn diff(&self, j: usize, eta: &TangentVector<T>) -> TangentVector<T> {
        let k_max = self.degree();
        // eta_i^[k] is nonzero only for j-k ≤ i ≤ j
        let mut level: Vec<Option<TangentVector<T>>> = (0..=k_max).map(|i| (i == j).then(|| eta.clone())).collect();
        for (k, geos) in self.nodes.iter().enumerate() {
            let next = geos
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let a = level[i].as_ref().map(|e| g.jacobi(self.t, e));
                    let b = level[i + 1].as_ref().map(|e| g.jacobi_reversed(self.t, e));
                    match (a, b) {
                        (Some(a), Some(b)) => Some(a + b),
                        (a, b) => a.or(b),
                    }
                })
                .collect();
            level = next;
            debug_assert_eq!(level.len(), k_max - k);
        }
        level.pop().flatten().unwrap_or_else(|| TangentVector::zeros(eta.len()))
    }

    /// Pulls `ν ∈ T_{β(t)}M` back to every control point at once.
    pub fn adjoint(&self, nu: &TangentVector<T>) -> Vec<TangentVector<T>> {
        let mut level = vec![nu.clone()];
        for geos in self.nodes.iter().rev() {
            let mut prev = vec![TangentVector::zeros(nu.len()); geos.len() + 1];
            for (i, (g, v)) in geos.iter().zip(&level).enumerate() {
                prev[i] += &g.adjoint_jacobi(self.t, v);
                prev[i + 1] += &g.adjoint_jacobi_reversed(self.t, v);
            }
            level = prev;
        }
        level
    }

    /// The component of [`DeCasteljauTree::adjoint`] at control point `j`.
    pub fn adjoint_at(&self, j: usize, nu: &TangentVector<T>) -> TangentVector<T> {
        self.adjoint(nu).swap_remove(j)
    }
}
