use std::path::Path;

use anyhow::{bail, Context};
use mbezier::{BezierSegment, CompositeBezier, DifferenceScale, FittingProblem, Lambda, Manifold, Point, VariablePack};
use serde::{Deserialize, Serialize};

/// Problem definition as read from `--config`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub manifold: Manifold,
    pub degree: usize,
    pub lambda: Lambda<f64>,
    #[serde(rename = "N")]
    pub intervals: usize,
    pub data: Vec<Point<f64>>,
    /// `doubled` (default) uses `d₂ = 2·dist(c, y)`, `plain` uses `dist(c, y)`.
    #[serde(default)]
    pub difference_scale: DifferenceScale,
    /// One control polygon (`degree + 1` points) per segment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_controls: Option<Vec<Vec<Point<f64>>>>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        anyhow::anyhow!("{}: field `{}`: {}", path.display(), field, e.into_inner())
    })
}

impl ProblemFile {
    pub fn problem(&self, lambda: Lambda<f64>, intervals: usize) -> anyhow::Result<FittingProblem<f64>> {
        let p = FittingProblem::new(self.manifold, self.degree, self.data.clone(), lambda, intervals)?;
        Ok(p.with_difference_scale(self.difference_scale))
    }

    /// The given initial controls, or the default initialization.
    pub fn initial_pack(&self, problem: &FittingProblem<f64>) -> anyhow::Result<VariablePack<f64>> {
        let Some(polys) = &self.initial_controls else {
            return Ok(problem.default_initialization().context("default initialization")?);
        };
        if polys.len() != problem.n() {
            bail!("initial_controls: {} segments given, data implies {}", polys.len(), problem.n());
        }
        let segments = polys
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if p.len() != self.degree + 1 {
                    bail!(
                        "initial_controls[{i}]: {} points, degree {} needs {}",
                        p.len(),
                        self.degree,
                        self.degree + 1
                    );
                }
                Ok(BezierSegment::new(p.clone())?)
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let curve = CompositeBezier::new(self.manifold, segments).context("initial_controls")?;
        let curve = curve.enforce_c1().context("initial_controls")?;
        Ok(problem.pack_curve(&curve)?)
    }
}

/// `control_points.json`: the curve and the grid it was sampled on.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlPointsFile {
    #[serde(rename = "N")]
    pub intervals: usize,
    #[serde(default)]
    pub difference_scale: DifferenceScale,
    pub curve: CompositeBezier<f64>,
}
