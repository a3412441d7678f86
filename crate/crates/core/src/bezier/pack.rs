use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{BezierSegment, CompositeBezier};
use crate::error::{Error, Result};
use crate::manifold::{Geodesic, Manifold, Point, TangentVector};
use crate::scalar::Real;

/// Which control points are optimisation variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Junctions are free; the data enter through a penalty.
    Fitting,
    /// Junctions are pinned to the data.
    Interpolation,
}

/// Role of control point `j` of segment `s` in a [`VariablePack`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// Entry of the free variable list.
    Free(usize),
    /// Junction held fixed (interpolation only).
    Fixed(usize),
    /// `b_s^+`, reconstructed as `g(2; b_s^-, p_s)`.
    Derived,
}

/// The free control points of a C¹ composite Bézier curve in the order
/// `p_0, b_0^+, …, b_1^-, p_1, b_3^1, …, b_n^-, p_n` (fitting) or with the
/// junctions removed (interpolation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + DeserializeOwned"))]
pub struct VariablePack<T> {
    pub mode: Mode,
    pub manifold: Manifold,
    pub n: usize,
    pub degree: usize,
    pub points: Vec<Point<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixed_junctions: Vec<Point<T>>,
}

/// Number of free variables for `n` segments of degree `k`.
pub fn free_count(mode: Mode, n: usize, k: usize) -> usize {
    match mode {
        Mode::Fitting => n * (k - 1) + 2,
        Mode::Interpolation => n * (k - 2) + 1,
    }
}

/// Role of control point `j` of segment `s` for `n` segments of degree `k`.
pub fn slot(mode: Mode, k: usize, s: usize, j: usize) -> Slot {
    match mode {
        Mode::Fitting => match (s, j) {
            (0, j) => Slot::Free(j),
            (s, 0) => slot(mode, k, s - 1, k),
            (_, 1) => Slot::Derived,
            (s, j) => Slot::Free(k + 1 + (s - 1) * (k - 1) + (j - 2)),
        },
        Mode::Interpolation => match (s, j) {
            (s, 0) => Slot::Fixed(s),
            (s, j) if j == k => Slot::Fixed(s + 1),
            (0, j) => Slot::Free(j - 1),
            (_, 1) => Slot::Derived,
            (s, j) => Slot::Free(k - 1 + (s - 1) * (k - 2) + (j - 2)),
        },
    }
}

fn check_degree(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Pack(format!("C1 packing needs degree at least 2, got {k}")));
    }
    Ok(())
}

impl<T: Real> VariablePack<T> {
    /// Extracts the free variables of a curve. The `b_i^+` are dropped, so
    /// the curve should already be C¹ for [`VariablePack::unpack`] to
    /// reproduce it.
    pub fn pack(curve: &CompositeBezier<T>, mode: Mode) -> Result<Self> {
        let (n, k) = (curve.n(), curve.degree());
        check_degree(k)?;
        let mut points: Vec<Option<Point<T>>> = vec![None; free_count(mode, n, k)];
        for (s, seg) in curve.segments().iter().enumerate() {
            for (j, p) in seg.points.iter().enumerate() {
                if let Slot::Free(i) = slot(mode, k, s, j) {
                    points[i].get_or_insert_with(|| p.clone());
                }
            }
        }
        let fixed_junctions = match mode {
            Mode::Fitting => Vec::new(),
            Mode::Interpolation => (0..=n).map(|i| curve.junction(i).clone()).collect(),
        };
        Ok(VariablePack {
            mode,
            manifold: curve.manifold(),
            n,
            degree: k,
            points: points.into_iter().map(|p| p.expect("every free slot is visited")).collect(),
            fixed_junctions,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn slot(&self, s: usize, j: usize) -> Slot {
        slot(self.mode, self.degree, s, j)
    }

    /// Free-variable index of junction `p_i`, if it is free.
    pub fn junction_index(&self, i: usize) -> Option<usize> {
        let s = i.min(self.n - 1);
        let j = if i == self.n { self.degree } else { 0 };
        match self.slot(s, j) {
            Slot::Free(idx) => Some(idx),
            _ => None,
        }
    }

    /// Same layout, different points.
    pub fn with_points(&self, points: Vec<Point<T>>) -> Result<Self> {
        if points.len() != self.points.len() {
            return Err(Error::Pack(format!("expected {} points, got {}", self.points.len(), points.len())));
        }
        Ok(VariablePack { points, ..self.clone() })
    }

    fn check(&self) -> Result<()> {
        check_degree(self.degree)?;
        if self.n == 0 {
            return Err(Error::Pack("no segments".into()));
        }
        let want = free_count(self.mode, self.n, self.degree);
        if self.points.len() != want {
            return Err(Error::Pack(format!(
                "{} segments of degree {} need {want} free points, got {}",
                self.n,
                self.degree,
                self.points.len()
            )));
        }
        let fixed = if self.mode == Mode::Interpolation { self.n + 1 } else { 0 };
        if self.fixed_junctions.len() != fixed {
            return Err(Error::Pack(format!("expected {fixed} fixed junctions, got {}", self.fixed_junctions.len())));
        }
        for p in self.points.iter().chain(&self.fixed_junctions) {
            self.manifold.check_point(p)?;
        }
        Ok(())
    }

    pub fn unpack(&self) -> Result<CompositeBezier<T>> {
        Ok(self.unpack_linked()?.curve)
    }

    /// Rebuilds the C¹ curve and keeps the reflection geodesics needed to
    /// differentiate through it.
    pub fn unpack_linked(&self) -> Result<LinkedCurve<T>> {
        self.check()?;
        let (n, k) = (self.n, self.degree);
        let mut segments: Vec<BezierSegment<T>> = Vec::with_capacity(n);
        let mut links = Vec::with_capacity(n);
        links.push(None);
        for s in 0..n {
            let mut pts = Vec::with_capacity(k + 1);
            let mut link = None;
            for j in 0..=k {
                let p = match self.slot(s, j) {
                    Slot::Free(i) => self.points[i].clone(),
                    Slot::Fixed(i) => self.fixed_junctions[i].clone(),
                    Slot::Derived => {
                        let minus = &segments[s - 1].points[k - 1];
                        let g = Geodesic::new(self.manifold, minus, &pts[0])
                            .map_err(|e| e.context(format!("C1 reflection at junction {s}")))?;
                        let plus = g.point(T::lit(2.0));
                        link = Some(g);
                        plus
                    }
                };
                pts.push(p);
            }
            if s > 0 {
                links.push(link);
            }
            segments.push(BezierSegment { points: pts });
        }
        let curve = CompositeBezier::from_parts(self.manifold, k, segments);
        Ok(LinkedCurve { layout: self.layout(), curve, links })
    }

    fn layout(&self) -> Layout {
        Layout { mode: self.mode, n: self.n, degree: self.degree, len: self.points.len() }
    }

    /// Componentwise exponential map `Exp_{x_i}[s·v_i]`.
    pub fn retract(&self, direction: &[TangentVector<T>], s: T) -> Result<Self> {
        if direction.len() != self.points.len() {
            return Err(Error::Pack(format!("direction has {} entries, pack has {}", direction.len(), self.len())));
        }
        let points = self
            .points
            .iter()
            .zip(direction)
            .enumerate()
            .map(|(i, (x, v))| self.manifold.exp(x, &v.scaled(s)).map_err(|e| e.context(format!("variable {i}"))))
            .collect::<Result<Vec<_>>>()?;
        self.with_points(points)
    }

    /// `Σ_i dist(x_i, y_i)` between two packs of the same layout.
    pub fn displacement(&self, other: &Self) -> Result<T> {
        let mut total = T::zero();
        for (a, b) in self.points.iter().zip(&other.points) {
            total = total + self.manifold.dist(a, b)?;
        }
        Ok(total)
    }
}

#[derive(Clone, Copy, Debug)]
struct Layout {
    mode: Mode,
    n: usize,
    degree: usize,
    len: usize,
}

/// A curve rebuilt from a [`VariablePack`], together with the geodesics
/// `b_s^- → p_s` whose extrapolation at `t = 2` gives each `b_s^+`.
#[derive(Clone, Debug)]
pub struct LinkedCurve<T: Real> {
    layout: Layout,
    pub curve: CompositeBezier<T>,
    links: Vec<Option<Geodesic<T>>>,
}

impl<T: Real> LinkedCurve<T> {
    fn slot(&self, s: usize, j: usize) -> Slot {
        slot(self.layout.mode, self.layout.degree, s, j)
    }

    /// Zeroed per-control-point cotangent buffer, `[segment][index]`.
    pub fn leaf_buffer(&self) -> Vec<Vec<TangentVector<T>>> {
        let z = self.curve.manifold().zero_tangent();
        vec![vec![z; self.layout.degree + 1]; self.layout.n]
    }

    /// Maps cotangents at every control point of the curve to the free
    /// variables, following each `b_s^+ = g(2; b_s^-, p_s)` back to
    /// `b_s^-` and `p_s`. Fixed junctions are dropped.
    pub fn pull_back(&self, mut leaves: Vec<Vec<TangentVector<T>>>) -> Vec<TangentVector<T>> {
        let k = self.layout.degree;
        let two = T::lit(2.0);
        // decreasing s: for K = 2 the target b_s^- may itself be derived
        for s in (1..self.layout.n).rev() {
            let g = self.links[s].as_ref().expect("every later segment has a link");
            let nu = std::mem::replace(&mut leaves[s][1], self.curve.manifold().zero_tangent());
            let to_minus = g.adjoint_jacobi(two, &nu);
            let to_p = g.adjoint_jacobi_reversed(two, &nu);
            leaves[s - 1][k - 1] += &to_minus;
            leaves[s][0] += &to_p;
        }
        let mut out = vec![self.curve.manifold().zero_tangent(); self.layout.len];
        for (s, seg) in leaves.iter().enumerate() {
            for (j, v) in seg.iter().enumerate() {
                if let Slot::Free(i) = self.slot(s, j) {
                    out[i] += v;
                }
            }
        }
        out
    }

    /// Tangent vectors at the control points of segment `s` induced by a
    /// variation `direction` of the free variables.
    pub fn push_forward(&self, s: usize, direction: &[TangentVector<T>]) -> Vec<TangentVector<T>> {
        let k = self.layout.degree;
        let two = T::lit(2.0);
        let at = |s: usize, j: usize| -> TangentVector<T> { self.push_forward_point(s, j, direction, two, k) };
        (0..=k).map(|j| at(s, j)).collect()
    }

    fn push_forward_point(
        &self,
        s: usize,
        j: usize,
        direction: &[TangentVector<T>],
        two: T,
        k: usize,
    ) -> TangentVector<T> {
        match self.slot(s, j) {
            Slot::Free(i) => direction[i].clone(),
            Slot::Fixed(_) => self.curve.manifold().zero_tangent(),
            Slot::Derived => {
                let g = self.links[s].as_ref().expect("derived slot has a link");
                let minus = self.push_forward_point(s - 1, k - 1, direction, two, k);
                let p = self.push_forward_point(s, 0, direction, two, k);
                g.jacobi(two, &minus) + g.jacobi_reversed(two, &p)
            }
        }
    }

    /// Gradient-style pull-back of `ν ∈ T_{B(t)}M` to every free variable.
    pub fn adjoint_diff(&self, t: T, nu: &TangentVector<T>) -> Result<Vec<TangentVector<T>>> {
        let (s, tree) = self.curve.tree(t)?;
        let mut leaves = self.leaf_buffer();
        leaves[s] = tree.adjoint(nu);
        Ok(self.pull_back(leaves))
    }

    /// Differential of `B(t)` along a variation of the free variables.
    pub fn diff(&self, t: T, direction: &[TangentVector<T>]) -> Result<TangentVector<T>> {
        if direction.len() != self.layout.len {
            return Err(Error::Pack(format!(
                "direction has {} entries, pack has {}",
                direction.len(),
                self.layout.len
            )));
        }
        let (s, tree) = self.curve.tree(t)?;
        let mut out = self.curve.manifold().zero_tangent();
        for (j, eta) in self.push_forward(s, direction).iter().enumerate() {
            if !eta.is_zero() {
                out += &tree.diff(j, eta);
            }
        }
        Ok(out)
    }
}
