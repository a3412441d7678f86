//! Reference experiments: data, initial control points, weights and solver
//! settings for a Euclidean validation, three sphere experiments and one on
//! rotations, each with the published values they should reproduce.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::bezier::{BezierSegment, CompositeBezier, VariablePack};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, TangentVector};
use crate::objective::{first_order_diffs, sample, DifferenceScale, FittingProblem, Lambda};
use crate::solver::{gradient_descent, ArmijoParams, Solution, StoppingCriteria};

pub const NAMES: [&str; 5] =
    ["euclidean-validation", "sphere-geodesic", "sphere-lambda-sweep", "sphere-compare", "so3-orientations"];

/// A ready-to-run optimisation.
#[derive(Clone, Debug)]
pub struct Preset {
    pub label: String,
    pub problem: FittingProblem<f64>,
    pub init: VariablePack<f64>,
    pub armijo: ArmijoParams<f64>,
    pub stopping: StoppingCriteria<f64>,
}

impl Preset {
    pub fn run(&self) -> Result<Solution<f64>> {
        gradient_descent(&self.problem, &self.init, &self.armijo, &self.stopping)
            .map_err(|e| e.context(self.label.clone()))
    }
}

fn pt(c: &[f64]) -> Point<f64> {
    Point::from_slice(c)
}

fn tv(c: &[f64], s: f64) -> TangentVector<f64> {
    TangentVector::new(c.iter().map(|x| x * s))
}

fn cubic_curve(m: Manifold, polygons: Vec<[Point<f64>; 4]>) -> Result<CompositeBezier<f64>> {
    let segs = polygons.into_iter().map(|p| BezierSegment::new(p.to_vec())).collect::<Result<Vec<_>>>()?;
    CompositeBezier::new(m, segs)
}

fn preset(label: &str, problem: FittingProblem<f64>, curve: &CompositeBezier<f64>) -> Result<Preset> {
    let problem = problem.with_difference_scale(DifferenceScale::Plain);
    let init = problem.pack_curve(curve)?;
    let stopping = StoppingCriteria::for_manifold(problem.manifold());
    Ok(Preset { label: label.to_string(), problem, init, armijo: ArmijoParams::default(), stopping })
}

fn unit_data() -> Vec<Point<f64>> {
    let s = 82f64.sqrt();
    vec![pt(&[0.0, 0.0, 1.0]), pt(&[0.0, -1.0, 0.0]), pt(&[-1.0, 0.0, 0.0]), pt(&[0.0, -1.0 / s, -9.0 / s])]
}

/// Initial curve built from tangent vectors at the data, on `R^3` or `S^2`.
fn unit_curve(m: Manifold) -> Result<CompositeBezier<f64>> {
    let d = unit_data();
    let a = PI / (2.0 * SQRT_2);
    let b0p = m.exp(&d[0], &tv(&[1.0, -1.0, 0.0], PI / (8.0 * SQRT_2)))?;
    let b1p = m.exp(&d[1], &tv(&[1.0, 0.0, 1.0], -a))?;
    let b1m = m.geodesic(&b1p, &d[1], 2.0)?;
    let b2p = m.exp(&d[2], &tv(&[0.0, 1.0, -1.0], a))?;
    let b2m = m.geodesic(&b2p, &d[2], 2.0)?;
    let b3m = m.exp(&d[3], &tv(&[-1.0, 0.0, 0.0], PI / 8.0))?;
    cubic_curve(
        m,
        vec![
            [d[0].clone(), b0p, b1m, d[1].clone()],
            [d[1].clone(), b1p, b2m, d[2].clone()],
            [d[2].clone(), b2p, b3m, d[3].clone()],
        ],
    )
}

/// Cubic fit in `R^3` with `λ = 50` on 1600 grid points.
pub fn euclidean_validation() -> Result<Preset> {
    let m = Manifold::euclidean(3);
    let problem = FittingProblem::new(m, 3, unit_data(), Lambda::Finite(50.0), 1599)?;
    preset("euclidean-validation", problem, &unit_curve(m)?)
}

/// Data on the great circle `x = 0`; interpolation should recover it.
pub fn sphere_geodesic() -> Result<Preset> {
    let m = Manifold::sphere(2);
    let s6 = 6f64.sqrt();
    let d = vec![pt(&[0.0, 0.0, 1.0]), pt(&[0.0, 1.0, 0.0]), pt(&[0.0, 0.0, -1.0])];
    let x0 = pt(&[1.0 / s6, 1.0 / s6, 2.0 / s6]);
    let x2 = pt(&[-1.0 / s6, 1.0 / s6, -2.0 / s6]);
    let b0p = m.exp(&d[0], &m.log(&d[0], &x0)?.scaled(3.0))?;
    let b1m = pt(&[1.0 / s6, 2.0 / s6, 1.0 / s6]);
    let b1p = pt(&[-1.0 / s6, 2.0 / s6, -1.0 / s6]);
    // the tangent is taken at p_0; T_{p_0} and T_{p_2} coincide for antipodes
    let b2m = m.exp(&d[2], &m.log(&d[0], &x2)?.scaled(1.0 / 3.0))?;
    let curve = cubic_curve(m, vec![[d[0].clone(), b0p, b1m, d[1].clone()], [d[1].clone(), b1p, b2m, d[2].clone()]])?;
    let problem = FittingProblem::new(m, 3, d, Lambda::Infinite, 200)?;
    preset("sphere-geodesic", problem, &curve)
}

/// Weights of the λ sweep (`None` is interpolation), the published MSA of
/// each minimiser and the acceptance criterion for it.
pub const SWEEP: [(Option<f64>, f64, Criterion); 7] = [
    (None, 4.1339, Criterion::Relative { target: 4.1339, rel: 0.05 }),
    (Some(10.0), 1.6592, Criterion::Relative { target: 1.6592, rel: 0.05 }),
    (Some(1.0), 0.0733, Criterion::Relative { target: 0.0733, rel: 0.05 }),
    (Some(0.1), 0.0010, Criterion::AtMost { bound: 2e-3 }),
    (Some(0.01), 1.0814e-5, Criterion::AtMost { bound: 5e-5 }),
    (Some(0.001), 1.6240e-7, Criterion::AtMost { bound: 1e-6 }),
    (Some(0.0), 3.5988e-9, Criterion::AtMost { bound: 1e-7 }),
];

/// Iteration cap for the sweep. Small `λ` converge slowly; the MSA bounds are
/// met after about 2000 steps.
pub const SWEEP_MAX_ITERATIONS: usize = 5000;

/// Published objective value of the initial three-segment sphere curve.
pub const SWEEP_INITIAL: f64 = 10.6122;

/// Three-segment sphere curve; `None` means interpolation.
pub fn sphere_lambda_sweep(lambda: Option<f64>) -> Result<Preset> {
    let m = Manifold::sphere(2);
    let d = vec![pt(&[0.0, 0.0, 1.0]), pt(&[0.0, -1.0, 0.0]), pt(&[-1.0, 0.0, 0.0]), pt(&[0.0, 0.0, -1.0])];
    let a = PI / (8.0 * SQRT_2);
    let b0p = m.exp(&d[0], &tv(&[1.0, -1.0, 0.0], a))?;
    let b1p = m.exp(&d[1], &tv(&[-1.0, 0.0, 1.0], -2.0 * a))?;
    let b2p = m.exp(&d[2], &tv(&[0.0, 1.0, -1.0], 2.0 * a))?;
    let b3m = m.exp(&d[3], &tv(&[-1.0, 1.0, 0.0], -a))?;
    let b1m = m.geodesic(&b1p, &d[1], 2.0)?;
    let b2m = m.geodesic(&b2p, &d[2], 2.0)?;
    let curve = cubic_curve(
        m,
        vec![
            [d[0].clone(), b0p, b1m, d[1].clone()],
            [d[1].clone(), b1p, b2m, d[2].clone()],
            [d[2].clone(), b2p, b3m, d[3].clone()],
        ],
    )?;
    let weight = match lambda {
        None => Lambda::Infinite,
        Some(l) => Lambda::new(l)?,
    };
    let problem = FittingProblem::new(m, 3, d, weight, 201)?;
    let label = match lambda {
        None => "sphere-lambda-sweep (interpolation)".to_string(),
        Some(l) => format!("sphere-lambda-sweep (lambda = {l})"),
    };
    let mut p = preset(&label, problem, &curve)?;
    p.stopping.max_iterations = SWEEP_MAX_ITERATIONS;
    Ok(p)
}

/// The Euclidean validation data and tangents read on `S^2`, `λ = 10`.
pub fn sphere_compare() -> Result<Preset> {
    let m = Manifold::sphere(2);
    let problem = FittingProblem::new(m, 3, unit_data(), Lambda::Finite(10.0), 201)?;
    preset("sphere-compare", problem, &unit_curve(m)?)
}

fn rot(plane: (usize, usize), a: f64) -> [f64; 9] {
    let mut r = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    let (i, j) = plane;
    let (s, c) = a.sin_cos();
    r[3 * i + i] = c;
    r[3 * i + j] = s;
    r[3 * j + i] = -s;
    r[3 * j + j] = c;
    r
}

fn matmul(a: &[f64; 9], b: &[f64; 9]) -> [f64; 9] {
    let mut out = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            out[3 * i + j] = (0..3).map(|k| a[3 * i + k] * b[3 * k + j]).sum();
        }
    }
    out
}

/// Rotation in the x-y plane, `[[c, s, 0], [−s, c, 0], [0, 0, 1]]`.
pub fn rot_xy(a: f64) -> [f64; 9] {
    rot((0, 1), a)
}

/// Rotation in the x-z plane, `[[c, 0, s], [0, 1, 0], [−s, 0, c]]`.
pub fn rot_xz(a: f64) -> [f64; 9] {
    rot((0, 2), a)
}

/// Rotation in the y-z plane, `[[1, 0, 0], [0, c, s], [0, −s, c]]`.
pub fn rot_yz(a: f64) -> [f64; 9] {
    rot((1, 2), a)
}

pub fn so3_data() -> Vec<Point<f64>> {
    let base = rot_yz(-PI / 2.0);
    vec![
        pt(&matmul(&rot_xy(4.0 * PI / 9.0), &base)),
        pt(&matmul(&rot_xz(-PI / 8.0), &matmul(&rot_xy(PI / 18.0), &base))),
        pt(&matmul(&rot_xy(5.0 * PI / 9.0), &base)),
    ]
}

/// Three orientations, `λ = 10`, 401 grid points, default initialization.
pub fn so3_orientations() -> Result<Preset> {
    let m = Manifold::Rotations3;
    let problem =
        FittingProblem::new(m, 3, so3_data(), Lambda::Finite(10.0), 400)?.with_difference_scale(DifferenceScale::Plain);
    let init = problem.default_initialization()?;
    Ok(Preset {
        label: "so3-orientations".into(),
        problem,
        init,
        armijo: ArmijoParams::default(),
        stopping: StoppingCriteria::curved(),
    })
}

/// How an achieved number is judged against a reference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// `|x − target| ≤ tol`
    Near { target: f64, tol: f64 },
    /// `|x − target| ≤ rel·|target|`
    Relative { target: f64, rel: f64 },
    /// `x ≤ bound`
    AtMost { bound: f64 },
    /// `x < bound`
    Below { bound: f64 },
    /// reported only
    Info,
}

impl Criterion {
    pub fn holds(&self, x: f64) -> bool {
        match *self {
            Criterion::Near { target, tol } => (x - target).abs() <= tol,
            Criterion::Relative { target, rel } => (x - target).abs() <= rel * target.abs(),
            Criterion::AtMost { bound } => x <= bound,
            Criterion::Below { bound } => x < bound,
            Criterion::Info => true,
        }
    }
}

/// One line of an experiment report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub quantity: String,
    pub achieved: f64,
    /// Published value, if there is one.
    pub published: Option<f64>,
    pub criterion: Criterion,
    pub passed: bool,
}

impl Comparison {
    pub fn new(quantity: impl Into<String>, achieved: f64, published: Option<f64>, criterion: Criterion) -> Self {
        Comparison { quantity: quantity.into(), achieved, published, passed: criterion.holds(achieved), criterion }
    }
}

/// A finished optimisation from a preset.
#[derive(Clone, Debug)]
pub struct Run {
    pub preset: Preset,
    pub initial: f64,
    pub solution: Solution<f64>,
    pub curve: CompositeBezier<f64>,
}

/// All runs of a named experiment and the comparison with published values.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: String,
    pub runs: Vec<Run>,
    pub report: Vec<Comparison>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.report.iter().all(|c| c.passed)
    }
}

fn execute(mut p: Preset, adjust: &dyn Fn(&mut Preset)) -> Result<Run> {
    adjust(&mut p);
    let initial = p.problem.objective(&p.init)?.total;
    let solution = p.run()?;
    let curve = solution.pack.unpack()?;
    Ok(Run { preset: p, initial, solution, curve })
}

/// Largest distance of the sampled curve to the great circle `x = 0`, and
/// to the unit-speed parametrisation of that circle from the north pole.
pub fn great_circle_deviation(curve: &CompositeBezier<f64>, grid: crate::DiscretizationGrid) -> Result<(f64, f64)> {
    let m = curve.manifold();
    let pts = sample(curve, grid)?;
    let times = grid.times::<f64>();
    let mut set_dist: f64 = 0.0;
    let mut param_dist: f64 = 0.0;
    for (q, &t) in pts.iter().zip(&times) {
        set_dist = set_dist.max(q.coords()[0].abs().min(1.0).asin());
        let a = t * PI / 2.0;
        let g = pt(&[0.0, a.sin(), a.cos()]);
        param_dist = param_dist.max(m.dist(q, &g)?);
    }
    Ok((set_dist, param_dist))
}

/// `(max − min) / mean` of a sequence.
pub fn relative_spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::MIN, f64::max);
    let min = v.iter().copied().fold(f64::MAX, f64::min);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (max - min) / mean
}

fn monotone_line(report: &mut Vec<Comparison>, run: &Run, tag: &str) {
    report.push(Comparison::new(
        format!("{tag}objective never increases"),
        if run.solution.trace.is_monotone() { 1.0 } else { 0.0 },
        None,
        Criterion::Near { target: 1.0, tol: 0.0 },
    ));
}

/// Runs a named experiment. Unknown names are an error listing the presets.
pub fn run(name: &str) -> Result<Outcome> {
    run_with(name, &|_| {})
}

/// [`run`] with a hook that may change each preset (for example its
/// stopping criteria) before it is solved.
pub fn run_with(name: &str, adjust: &dyn Fn(&mut Preset)) -> Result<Outcome> {
    let mut report = Vec::new();
    let runs = match name {
        "euclidean-validation" => {
            let r = execute(euclidean_validation()?, adjust)?;
            report.push(Comparison::new(
                "initial objective",
                r.initial,
                Some(18.8828),
                Criterion::Near { target: 18.8828, tol: 0.01 },
            ));
            let fin = r.solution.value.total;
            report.push(Comparison::new(
                "final objective",
                fin,
                Some(4.981218),
                Criterion::Near { target: 4.981218, tol: 0.05 },
            ));
            monotone_line(&mut report, &r, "");
            vec![r]
        }
        "sphere-geodesic" => {
            let r = execute(sphere_geodesic()?, adjust)?;
            let grid = r.preset.problem.grid();
            let (set, param) = great_circle_deviation(&r.curve, grid)?;
            let spread = relative_spread(&first_order_diffs(&r.curve, grid)?);
            report.push(Comparison::new(
                "max distance to the unit-speed geodesic",
                param,
                Some(2.2357e-6),
                Criterion::AtMost { bound: 1e-4 },
            ));
            report.push(Comparison::new(
                "max distance to the great circle",
                set,
                None,
                Criterion::AtMost { bound: 1e-4 },
            ));
            report.push(Comparison::new(
                "first order difference relative spread",
                spread,
                None,
                Criterion::AtMost { bound: 1e-3 },
            ));
            report.push(Comparison::new("final objective", r.solution.value.total, None, Criterion::Info));
            monotone_line(&mut report, &r, "");
            vec![r]
        }
        "sphere-lambda-sweep" => {
            let mut runs = Vec::new();
            for (i, (lambda, published, criterion)) in SWEEP.iter().enumerate() {
                let r = execute(sphere_lambda_sweep(*lambda)?, adjust)?;
                let tag = match lambda {
                    None => "lambda = inf: ".to_string(),
                    Some(l) => format!("lambda = {l}: "),
                };
                if i == 0 {
                    let msa0 = r.preset.problem.objective(&r.preset.init)?.msa;
                    let c = Criterion::Near { target: SWEEP_INITIAL, tol: 0.01 };
                    report.push(Comparison::new("initial MSA", msa0, Some(SWEEP_INITIAL), c));
                }
                report.push(Comparison::new(
                    format!("{tag}MSA of the minimiser"),
                    r.solution.value.msa,
                    Some(*published),
                    *criterion,
                ));
                monotone_line(&mut report, &r, &tag);
                runs.push(r);
            }
            runs
        }
        "sphere-compare" => {
            let r = execute(sphere_compare()?, adjust)?;
            report.push(Comparison::new(
                "initial objective",
                r.initial,
                Some(10.9103),
                Criterion::Near { target: 10.9103, tol: 0.01 },
            ));
            report.push(Comparison::new(
                "final objective",
                r.solution.value.total,
                Some(2.7908),
                Criterion::AtMost { bound: 2.85 },
            ));
            monotone_line(&mut report, &r, "");
            vec![r]
        }
        "so3-orientations" => {
            let r = execute(so3_orientations()?, adjust)?;
            report.push(Comparison::new(
                "initial objective (default initialization)",
                r.initial,
                None,
                Criterion::Info,
            ));
            let fin = r.solution.value.total;
            report.push(Comparison::new("final objective", fin, Some(0.2909), Criterion::AtMost { bound: 0.31 }));
            report.push(Comparison::new("final below initial", fin, None, Criterion::Below { bound: r.initial }));
            // objective of the blended-spline fit that the reference started from
            report.push(Comparison::new(
                "final objective vs blended-spline baseline",
                fin,
                Some(0.6464),
                Criterion::Info,
            ));
            monotone_line(&mut report, &r, "");
            vec![r]
        }
        other => {
            return Err(Error::Problem(format!("unknown experiment {other:?}; available: {}", NAMES.join(", "))));
        }
    };
    Ok(Outcome { name: name.to_string(), runs, report })
}
