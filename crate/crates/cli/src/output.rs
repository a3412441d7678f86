use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use mbezier::objective::{first_order_diffs, sample};
use mbezier::{CompositeBezier, DifferenceScale, DiscretizationGrid, GradientCheckRow, SolverTrace};
use serde::Serialize;

use crate::problem::ControlPointsFile;

/// Twelve significant digits.
fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn write(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(dir, name, &text)
}

/// `curve_samples.csv`, `first_order_diffs.csv` and `control_points.json`.
pub fn write_curve(
    dir: &Path,
    curve: &CompositeBezier<f64>,
    grid: DiscretizationGrid,
    difference_scale: DifferenceScale,
) -> anyhow::Result<()> {
    let pts = sample(curve, grid)?;
    let times = grid.times::<f64>();
    let dim = curve.manifold().ambient_dim();
    let mut csv = String::from("t");
    for i in 0..dim {
        write!(csv, ",x{i}")?;
    }
    csv.push('\n');
    for (t, p) in times.iter().zip(&pts) {
        csv.push_str(&num(*t));
        for c in p.coords() {
            csv.push(',');
            csv.push_str(&num(*c));
        }
        csv.push('\n');
    }
    write(dir, "curve_samples.csv", &csv)?;

    let mut csv = String::from("t,diff\n");
    for (t, d) in times.iter().zip(first_order_diffs(curve, grid)?) {
        writeln!(csv, "{},{}", num(*t), num(d))?;
    }
    write(dir, "first_order_diffs.csv", &csv)?;
    write_json(
        dir,
        "control_points.json",
        &ControlPointsFile { intervals: grid.intervals(), difference_scale, curve: curve.clone() },
    )
}

pub fn write_trace(dir: &Path, trace: &SolverTrace<f64>) -> anyhow::Result<()> {
    let mut csv = String::from("k,objective,grad_norm,step,displacement\n");
    for r in &trace.records {
        writeln!(csv, "{},{},{},{},{}", r.k, num(r.objective), num(r.grad_norm), num(r.step), num(r.displacement))?;
    }
    write(dir, "trace.csv", &csv)
}

pub fn write_gradcheck(dir: &Path, rows: &[GradientCheckRow<f64>]) -> anyhow::Result<()> {
    let mut csv = String::from("variable,analytic_norm,fd_norm,rel_error\n");
    for r in rows {
        writeln!(csv, "{},{},{},{}", r.variable, num(r.analytic_norm), num(r.fd_norm), num(r.rel_error))?;
    }
    write(dir, "gradcheck.csv", &csv)
}
