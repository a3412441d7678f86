use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{BezierSegment, DeCasteljauTree};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};
use crate::scalar::Real;

/// Largest allowed distance between the end of one segment and the start of
/// the next.
pub const JUNCTION_TOL: f64 = 1e-12;
/// Largest allowed distance between `b_i^+` and the reflection
/// `g(2; b_i^-, p_i)` for a curve to count as C¹.
pub const C1_TOL: f64 = 1e-9;

/// A composite Bézier curve on `[0, n]` made of `n` segments of common
/// degree `K`. Segment `i` covers `[i, i+1]`; its last control point is the
/// first control point of segment `i+1` (the junction `p_{i+1}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "CurveRepr<T>",
    into = "CurveRepr<T>",
    bound(serialize = "T: Real + Serialize", deserialize = "T: Real + DeserializeOwned")
)]
pub struct CompositeBezier<T: Real> {
    manifold: Manifold,
    degree: usize,
    segments: Vec<BezierSegment<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: DeserializeOwned"))]
struct CurveRepr<T> {
    manifold: Manifold,
    degree: usize,
    n: usize,
    segments: Vec<Vec<Point<T>>>,
}

impl<T: Real> TryFrom<CurveRepr<T>> for CompositeBezier<T> {
    type Error = Error;

    fn try_from(r: CurveRepr<T>) -> Result<Self> {
        if r.segments.len() != r.n {
            return Err(Error::InvalidCurve(format!("n = {} but {} segments given", r.n, r.segments.len())));
        }
        let segments = r.segments.into_iter().map(BezierSegment::new).collect::<Result<Vec<_>>>()?;
        let curve = CompositeBezier::new(r.manifold, segments)?;
        if curve.degree != r.degree {
            return Err(Error::InvalidCurve(format!(
                "degree = {} but segments have degree {}",
                r.degree, curve.degree
            )));
        }
        Ok(curve)
    }
}

impl<T: Real> From<CompositeBezier<T>> for CurveRepr<T> {
    fn from(c: CompositeBezier<T>) -> Self {
        CurveRepr {
            manifold: c.manifold,
            degree: c.degree,
            n: c.segments.len(),
            segments: c.segments.into_iter().map(|s| s.points).collect(),
        }
    }
}

impl<T: Real> CompositeBezier<T> {
    pub fn new(manifold: Manifold, segments: Vec<BezierSegment<T>>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::InvalidCurve("a curve needs at least one segment".into()));
        };
        let degree = first.degree();
        for (i, s) in segments.iter().enumerate() {
            if s.degree() != degree {
                return Err(Error::InvalidCurve(format!(
                    "segment {i} has degree {} but segment 0 has degree {degree}",
                    s.degree()
                )));
            }
            for (j, p) in s.points.iter().enumerate() {
                manifold.validate_point(p).map_err(|e| e.context(format!("segment {i}, control point {j}")))?;
            }
        }
        for (i, w) in segments.windows(2).enumerate() {
            let gap = manifold.dist(w[0].last(), w[1].first())?;
            if gap > T::lit(JUNCTION_TOL) {
                return Err(Error::InvalidCurve(format!("segments {i} and {} do not meet (gap {gap})", i + 1)));
            }
        }
        Ok(CompositeBezier { manifold, degree, segments })
    }

    /// Builds a curve from segments known to be valid and connected.
    pub(crate) fn from_parts(manifold: Manifold, degree: usize, segments: Vec<BezierSegment<T>>) -> Self {
        CompositeBezier { manifold, degree, segments }
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of segments.
    pub fn n(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[BezierSegment<T>] {
        &self.segments
    }

    pub fn into_segments(self) -> Vec<BezierSegment<T>> {
        self.segments
    }

    /// Junction `p_i`, `i = 0..=n`.
    pub fn junction(&self, i: usize) -> &Point<T> {
        if i == self.n() {
            self.segments[i - 1].last()
        } else {
            self.segments[i].first()
        }
    }

    /// Segment index and local parameter for `t ∈ [0, n]`; the integer
    /// `t = i ≥ 1` belongs to segment `i − 1`.
    pub fn locate(&self, t: T) -> Result<(usize, T)> {
        let n = self.n();
        if !(t >= T::zero() && t <= T::from_usize_lossy(n)) {
            return Err(Error::Domain { t: t.as_f64(), n });
        }
        let seg = t.ceil().to_usize().unwrap_or(0).saturating_sub(1).min(n - 1);
        Ok((seg, t - T::from_usize_lossy(seg)))
    }

    pub fn eval(&self, t: T) -> Result<Point<T>> {
        let (seg, local) = self.locate(t)?;
        self.segments[seg].decasteljau(self.manifold, local)
    }

    pub fn tree(&self, t: T) -> Result<(usize, DeCasteljauTree<T>)> {
        let (seg, local) = self.locate(t)?;
        Ok((seg, self.segments[seg].tree(self.manifold, local)?))
    }

    /// Replaces every `b_i^+` by `g(2; b_i^-, p_i)`, in increasing `i`.
    pub fn enforce_c1(&self) -> Result<Self> {
        let k = self.degree;
        let mut segments = self.segments.clone();
        for i in 1..segments.len() {
            let minus = &segments[i - 1].points[k - 1];
            let p = &segments[i].points[0];
            let plus = self
                .manifold
                .geodesic(minus, p, T::lit(2.0))
                .map_err(|e| e.context(format!("C1 reflection at junction {i}")))?;
            segments[i].points[1] = plus;
        }
        Ok(CompositeBezier { manifold: self.manifold, degree: k, segments })
    }

    /// Largest distance between `b_i^+` and `g(2; b_i^-, p_i)` over the
    /// interior junctions.
    pub fn c1_defect(&self) -> Result<T> {
        let k = self.degree;
        let mut worst = T::zero();
        for i in 1..self.n() {
            let minus = &self.segments[i - 1].points[k - 1];
            let plus = &self.segments[i].points[1];
            let reflected = self.manifold.geodesic(minus, &self.segments[i].points[0], T::lit(2.0))?;
            worst = worst.max(self.manifold.dist(&reflected, plus)?);
        }
        Ok(worst)
    }

    pub fn is_c1(&self) -> Result<bool> {
        Ok(self.c1_defect()? <= T::lit(C1_TOL))
    }
}
