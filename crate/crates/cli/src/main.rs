mod output;
mod problem;
mod random;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mbezier::experiments::{self, Comparison, Preset};
use mbezier::objective::{compare_gradients, msa};
use mbezier::{
    gradient_descent, ArmijoParams, FittingProblem, Lambda, Manifold, Solution, StoppingCriteria, TerminationReason,
    VariablePack,
};
use serde::Serialize;

use problem::{read_json, ControlPointsFile, ProblemFile};

const EXIT_INPUT: u8 = 1;
const EXIT_BACKTRACK: u8 = 2;
const EXIT_GRADCHECK: u8 = 3;

#[derive(Parser)]
#[command(name = "mbezier", version, about = "Fit C¹ composite Bézier curves on R^m, S^m and SO(3)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimise MSA + λ/2·Σ dist²(p_i, d_i) over the control points.
    Fit(ProblemArgs),
    /// Minimise the MSA with the junctions fixed to the data.
    Interpolate(ProblemArgs),
    /// Sample a curve from control_points.json without optimising.
    Eval(EvalArgs),
    /// Compare the analytic gradient with central finite differences.
    Gradcheck(GradcheckArgs),
    /// Run a reference experiment and compare with published values.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SolverOverrides {
    /// Iteration limit.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Stop when the summed displacement of an iteration drops below this.
    #[arg(long)]
    eps: Option<f64>,
    /// Stop when the gradient norm drops below this.
    #[arg(long)]
    grad_eps: Option<f64>,
}

impl SolverOverrides {
    fn apply(&self, mut s: StoppingCriteria<f64>) -> StoppingCriteria<f64> {
        if let Some(k) = self.max_iter {
            s.max_iterations = k;
        }
        if let Some(e) = self.eps {
            s.min_change = e;
        }
        if let Some(g) = self.grad_eps {
            s.min_grad_norm = g;
        }
        s
    }
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem JSON: {manifold, degree, lambda, N, data, initial_controls?}.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    /// Data weight, a number or `inf` (ignored by `interpolate`).
    #[arg(long)]
    lambda: Option<Lambda<f64>>,
    /// Number of grid intervals, a multiple of the number of segments.
    #[arg(long)]
    grid_n: Option<usize>,
    #[command(flatten)]
    solver: SolverOverrides,
}

#[derive(Args)]
struct EvalArgs {
    /// control_points.json as written by `fit`.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    #[arg(long)]
    grid_n: Option<usize>,
}

#[derive(Args)]
struct GradcheckArgs {
    /// Problem JSON; without it a random problem is drawn from `--seed`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    /// Manifold of the random problem: `euclidean:M`, `sphere:M` or `so3`.
    #[arg(long, default_value = "sphere:2", value_parser = parse_manifold)]
    manifold: Manifold,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    lambda: Option<Lambda<f64>>,
    #[arg(long)]
    grid_n: Option<usize>,
    /// Finite difference step.
    #[arg(long, default_value_t = 1e-6)]
    step: f64,
    /// Test hook: scale the largest gradient component by 1.01.
    #[arg(long, hide = true)]
    corrupt_gradient: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of: euclidean-validation, sphere-geodesic, sphere-lambda-sweep,
    /// sphere-compare, so3-orientations.
    name: String,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    #[command(flatten)]
    solver: SolverOverrides,
}

fn parse_manifold(s: &str) -> Result<Manifold, String> {
    let dim = |d: &str| d.parse::<usize>().map_err(|e| format!("bad dimension {d:?}: {e}"));
    match s.split_once(':') {
        Some(("euclidean", d)) => Ok(Manifold::euclidean(dim(d)?)),
        Some(("sphere", d)) => Ok(Manifold::sphere(dim(d)?)),
        None if s == "so3" => Ok(Manifold::Rotations3),
        _ => Err(format!("unknown manifold {s:?}; use euclidean:M, sphere:M or so3")),
    }
}

#[derive(Serialize)]
struct RunSummary {
    label: String,
    initial_objective: f64,
    final_objective: f64,
    final_msa: f64,
    final_data_term: f64,
    final_grad_norm: f64,
    iterations: usize,
    reason: TerminationReason,
}

impl RunSummary {
    fn new(label: &str, sol: &Solution<f64>) -> Self {
        let last = sol.trace.records.last().expect("trace has the initial record");
        RunSummary {
            label: label.to_string(),
            initial_objective: sol.trace.initial_objective(),
            final_objective: sol.value.total,
            final_msa: sol.value.msa,
            final_data_term: sol.value.data_term,
            final_grad_norm: last.grad_norm,
            iterations: sol.trace.iterations(),
            reason: sol.trace.reason,
        }
    }
}

#[derive(Serialize, Default)]
struct Summary {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    manifold: Option<Manifold>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<Lambda<f64>>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    intervals: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    runs: Vec<RunSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    msa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<Vec<Comparison>>,
    exit_code: u8,
    error: Option<String>,
}

impl Summary {
    fn describe(&mut self, p: &FittingProblem<f64>) {
        self.manifold = Some(p.manifold());
        self.degree = Some(p.degree());
        self.lambda = Some(p.lambda());
        self.intervals = Some(p.grid().intervals());
    }
}

fn exit_for(reason: TerminationReason) -> u8 {
    if reason == TerminationReason::BacktrackFail {
        EXIT_BACKTRACK
    } else {
        0
    }
}

fn solve_and_write(
    dir: &Path,
    problem: &FittingProblem<f64>,
    init: &VariablePack<f64>,
    stopping: &StoppingCriteria<f64>,
) -> anyhow::Result<Solution<f64>> {
    let sol = gradient_descent(problem, init, &ArmijoParams::default(), stopping)?;
    output::write_curve(dir, &sol.pack.unpack()?, problem.grid(), problem.difference_scale())?;
    output::write_trace(dir, &sol.trace)?;
    Ok(sol)
}

fn run_problem(args: &ProblemArgs, interpolate: bool, summary: &mut Summary) -> anyhow::Result<u8> {
    let file: ProblemFile = read_json(&args.config)?;
    let lambda = if interpolate { Lambda::Infinite } else { args.lambda.unwrap_or(file.lambda) };
    let problem = file.problem(lambda, args.grid_n.unwrap_or(file.intervals))?;
    summary.describe(&problem);
    let init = file.initial_pack(&problem)?;
    let stopping = args.solver.apply(StoppingCriteria::for_manifold(problem.manifold()));
    let sol = solve_and_write(&args.output, &problem, &init, &stopping)?;
    summary.runs.push(RunSummary::new(&summary.command, &sol));
    Ok(exit_for(sol.trace.reason))
}

fn run_eval(args: &EvalArgs, summary: &mut Summary) -> anyhow::Result<u8> {
    let file: ControlPointsFile = read_json(&args.config)?;
    let grid = mbezier::DiscretizationGrid::new(file.curve.n(), args.grid_n.unwrap_or(file.intervals))?;
    summary.manifold = Some(file.curve.manifold());
    summary.degree = Some(file.curve.degree());
    summary.intervals = Some(grid.intervals());
    output::write_curve(&args.output, &file.curve, grid, file.difference_scale)?;
    summary.msa = Some(file.difference_scale.factor::<f64>() * msa(&file.curve, grid)?);
    Ok(0)
}

fn run_gradcheck(args: &GradcheckArgs, summary: &mut Summary) -> anyhow::Result<u8> {
    let (mut problem, pack) = match &args.config {
        Some(path) => {
            let file: ProblemFile = read_json(path)?;
            let problem = file.problem(file.lambda, file.intervals)?;
            let pack = file.initial_pack(&problem)?;
            (problem, pack)
        }
        None => random::problem(args.manifold, args.seed)?,
    };
    if let Some(l) = args.lambda {
        problem = problem.with_lambda(l);
    }
    if let Some(n) = args.grid_n {
        problem = problem.with_grid(n)?;
    }
    let pack = problem.pack_curve(&pack.unpack()?)?;
    summary.describe(&problem);
    let mut g = problem.gradient(&pack)?;
    let fd = problem.finite_difference_gradient(&pack, args.step)?;
    if args.corrupt_gradient {
        let worst = (0..g.len()).max_by(|&a, &b| g[a].norm().total_cmp(&g[b].norm())).context("no free variables")?;
        g[worst] = g[worst].scaled(1.01);
    }
    let rows = compare_gradients(&g, &fd);
    output::write_gradcheck(&args.output, &rows)?;
    let max = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    let threshold = match problem.manifold() {
        Manifold::Euclidean { .. } => 1e-6,
        _ => 1e-4,
    };
    summary.max_rel_error = Some(max);
    summary.threshold = Some(threshold);
    println!("max relative error {max:.3e} (threshold {threshold:.0e})");
    Ok(if max <= threshold { 0 } else { EXIT_GRADCHECK })
}

fn run_experiment(args: &ExperimentArgs, summary: &mut Summary) -> anyhow::Result<u8> {
    if !experiments::NAMES.contains(&args.name.as_str()) {
        bail!("unknown experiment {:?}; available: {}", args.name, experiments::NAMES.join(", "));
    }
    let adjust = |p: &mut Preset| p.stopping = args.solver.apply(p.stopping);
    let outcome = experiments::run_with(&args.name, &adjust)?;
    let multi = outcome.runs.len() > 1;
    let mut code = 0;
    for r in &outcome.runs {
        let dir = if multi { args.output.join(slug(&r.preset.label)) } else { args.output.clone() };
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        output::write_curve(&dir, &r.curve, r.preset.problem.grid(), r.preset.problem.difference_scale())?;
        output::write_trace(&dir, &r.solution.trace)?;
        summary.runs.push(RunSummary::new(&r.preset.label, &r.solution));
        code = code.max(exit_for(r.solution.trace.reason));
    }
    if !multi {
        summary.describe(&outcome.runs[0].preset.problem);
    }
    for c in &outcome.report {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        match c.published {
            Some(p) => println!("{verdict} {}: {:.6e} (published {p})", c.quantity, c.achieved),
            None => println!("{verdict} {}: {:.6e}", c.quantity, c.achieved),
        }
    }
    output::write_json(&args.output, "report.json", &outcome.report)?;
    summary.report = Some(outcome.report);
    Ok(code)
}

/// Directory name for a run label, e.g. `lambda-0.1`.
fn slug(label: &str) -> String {
    let inner = label.split_once('(').map_or(label, |(_, r)| r.trim_end_matches(')'));
    inner.replace(" = ", "-").replace(' ', "-")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, output) = match &cli.command {
        Command::Fit(a) => ("fit", &a.output),
        Command::Interpolate(a) => ("interpolate", &a.output),
        Command::Eval(a) => ("eval", &a.output),
        Command::Gradcheck(a) => ("gradcheck", &a.output),
        Command::Experiment(a) => ("experiment", &a.output),
    };
    let mut summary = Summary { command: name.to_string(), ..Default::default() };
    let result =
        std::fs::create_dir_all(output).with_context(|| format!("creating {}", output.display())).and_then(|_| {
            match &cli.command {
                Command::Fit(a) => run_problem(a, false, &mut summary),
                Command::Interpolate(a) => run_problem(a, true, &mut summary),
                Command::Eval(a) => run_eval(a, &mut summary),
                Command::Gradcheck(a) => run_gradcheck(a, &mut summary),
                Command::Experiment(a) => run_experiment(a, &mut summary),
            }
        });
    let code = match result {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            summary.error = Some(format!("{e:#}"));
            EXIT_INPUT
        }
    };
    summary.exit_code = code;
    if let Err(e) = output::write_json(output, "summary.json", &summary) {
        eprintln!("error: {e:#}");
    }
    ExitCode::from(code)
}
