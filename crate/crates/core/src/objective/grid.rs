use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `N + 1` equispaced parameters `t_k = k·n/N` on `[0, n]`.
///
/// `N` counts intervals and must be a multiple of `n` (at least `2n`), so
/// every junction is a grid point and each grid point can be assigned to a
/// segment by integer arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscretizationGrid {
    segments: usize,
    intervals: usize,
}

impl DiscretizationGrid {
    pub fn new(segments: usize, intervals: usize) -> Result<Self> {
        if segments == 0 {
            return Err(Error::Problem("grid needs at least one segment".into()));
        }
        if intervals < 2 * segments || intervals % segments != 0 {
            return Err(Error::Problem(format!(
                "N = {intervals} must be a multiple of n = {segments} and at least {}",
                2 * segments
            )));
        }
        Ok(DiscretizationGrid { segments, intervals })
    }

    /// Smallest admissible interval count not below `intervals`.
    pub fn rounded_up(segments: usize, intervals: usize) -> Result<Self> {
        let n = segments.max(1);
        let k = intervals.max(2 * n).div_ceil(n) * n;
        Self::new(segments, k)
    }

    /// Number of segments `n`.
    pub fn segments(&self) -> usize {
        self.segments
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn per_segment(&self) -> usize {
        self.intervals / self.segments
    }

    pub fn dt<T: Real>(&self) -> T {
        T::from_usize_lossy(self.segments) / T::from_usize_lossy(self.intervals)
    }

    pub fn time<T: Real>(&self, k: usize) -> T {
        T::from_usize_lossy(k * self.segments) / T::from_usize_lossy(self.intervals)
    }

    pub fn times<T: Real>(&self) -> Vec<T> {
        (0..=self.intervals).map(|k| self.time(k)).collect()
    }

    /// Segment and local parameter of grid point `k`; junctions belong to
    /// the segment on their left.
    pub fn locate<T: Real>(&self, k: usize) -> (usize, T) {
        let q = self.per_segment();
        let seg = if k == 0 { 0 } else { (k - 1) / q };
        (seg, T::from_usize_lossy(k - seg * q) / T::from_usize_lossy(q))
    }
}
