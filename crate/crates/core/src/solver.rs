//! Riemannian gradient descent on the product of the free control points,
//! with Armijo backtracking.

use serde::{Deserialize, Serialize};

use crate::bezier::VariablePack;
use crate::error::{Error, Result};
use crate::manifold::{Manifold, TangentVector};
use crate::objective::{Evaluation, FittingProblem};
use crate::scalar::Real;

/// Right-hand side of the sufficient decrease test
/// `F(x) − F(Exp_x(−s∇F)) ≥ σ·s·r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decrease {
    /// `r = ‖∇F‖²`, invariant under rescaling of `F`.
    SquaredNorm,
    /// `r = ‖∇F‖`; can only succeed while `‖∇F‖ > σ`.
    Norm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmijoParams<T> {
    pub beta: T,
    pub sigma: T,
    pub alpha: T,
    pub max_backtracks: usize,
    pub decrease: Decrease,
}

impl<T: Real> Default for ArmijoParams<T> {
    fn default() -> Self {
        ArmijoParams {
            beta: T::lit(0.5),
            sigma: T::lit(1e-4),
            alpha: T::one(),
            max_backtracks: 60,
            decrease: Decrease::SquaredNorm,
        }
    }
}

impl<T: Real> ArmijoParams<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: T| v > T::zero() && v < T::one();
        if !unit(self.beta) || !unit(self.sigma) || !(self.alpha > T::zero()) || self.max_backtracks == 0 {
            return Err(Error::Problem(format!(
                "Armijo parameters need beta, sigma in (0, 1), alpha > 0, max_backtracks ≥ 1; got {self:?}"
            )));
        }
        Ok(())
    }

    fn required(&self, step: T, grad_norm: T) -> T {
        let r = match self.decrease {
            Decrease::SquaredNorm => grad_norm * grad_norm,
            Decrease::Norm => grad_norm,
        };
        self.sigma * step * r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingCriteria<T> {
    pub max_iterations: usize,
    /// Stop once `Σ_i dist(x_i^k, x_i^{k+1}) < min_change`.
    pub min_change: T,
    pub min_grad_norm: T,
}

impl<T: Real> StoppingCriteria<T> {
    /// Defaults for flat problems: `ε = 1e-15`, gradient norm `1e-9`.
    pub fn flat() -> Self {
        StoppingCriteria { max_iterations: 100_000, min_change: T::lit(1e-15), min_grad_norm: T::lit(1e-9) }
    }

    /// Defaults for curved problems: `ε = 1e-7`, gradient norm `1e-5`.
    pub fn curved() -> Self {
        StoppingCriteria { max_iterations: 100_000, min_change: T::lit(1e-7), min_grad_norm: T::lit(1e-5) }
    }

    pub fn for_manifold(m: Manifold) -> Self {
        match m {
            Manifold::Euclidean { .. } => Self::flat(),
            _ => Self::curved(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    MaxIter,
    MinChange,
    MinGradNorm,
    BacktrackFail,
}

/// State after iteration `k`; `k = 0` is the initial point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord<T> {
    pub k: usize,
    pub objective: T,
    pub grad_norm: T,
    pub step: T,
    pub displacement: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace<T> {
    pub records: Vec<IterationRecord<T>>,
    pub reason: TerminationReason,
}

impl<T: Real> SolverTrace<T> {
    /// Number of accepted steps.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn initial_objective(&self) -> T {
        self.records[0].objective
    }

    pub fn final_objective(&self) -> T {
        self.records[self.records.len() - 1].objective
    }

    /// Whether every accepted step decreased the objective.
    pub fn is_monotone(&self) -> bool {
        self.records.windows(2).all(|w| w[1].objective < w[0].objective)
    }
}

/// `‖v‖` on the product manifold: the ℓ² combination of component norms.
pub fn product_norm<T: Real>(v: &[TangentVector<T>]) -> T {
    v.iter().map(|c| c.dot(c)).sum::<T>().sqrt()
}

/// Accepted Armijo step together with the evaluation at the new point.
pub struct ArmijoStep<T: Real> {
    pub step: T,
    pub backtracks: usize,
    pub next: Evaluation<T>,
}

/// Backtracking line search from `current` along `−grad`.
pub fn armijo_step<T: Real>(
    problem: &FittingProblem<T>,
    current: &Evaluation<T>,
    grad: &[TangentVector<T>],
    params: &ArmijoParams<T>,
) -> Result<ArmijoStep<T>> {
    let grad_norm = product_norm(grad);
    let f0 = current.value.total;
    let descent: Vec<TangentVector<T>> = grad.iter().map(|g| -g.clone()).collect();
    let mut step = params.alpha;
    for m in 0..=params.max_backtracks {
        // a candidate that leaves the injectivity domain counts as a failed test
        if let Ok(next) = current.pack.retract(&descent, step).and_then(|p| problem.evaluate(&p)) {
            let decrease = f0 - next.value.total;
            if decrease >= params.required(step, grad_norm) && next.value.total.is_finite() {
                return Ok(ArmijoStep { step, backtracks: m, next });
            }
        }
        step = step * params.beta;
    }
    Err(Error::BacktrackFail { backtracks: params.max_backtracks })
}

/// Result of [`gradient_descent`]: the last iterate and the full trace.
#[derive(Clone, Debug)]
pub struct Solution<T: Real> {
    pub pack: VariablePack<T>,
    pub value: crate::objective::ObjectiveValue<T>,
    pub trace: SolverTrace<T>,
}

/// Gradient descent `x^{k+1} = Exp_{x^k}(−s_k ∇F(x^k))` with Armijo steps.
///
/// Before each step the gradient norm and then the iteration limit are
/// checked; after it, the change between iterates. A failed line search ends the run with
/// [`TerminationReason::BacktrackFail`] and the last accepted iterate.
pub fn gradient_descent<T: Real>(
    problem: &FittingProblem<T>,
    init: &VariablePack<T>,
    armijo: &ArmijoParams<T>,
    stopping: &StoppingCriteria<T>,
) -> Result<Solution<T>> {
    armijo.validate()?;
    let mut current = problem.evaluate(init).map_err(|e| e.context("initial curve"))?;
    let mut grad = current.gradient(problem).map_err(|e| e.context("gradient at iteration 0"))?;
    let mut grad_norm = product_norm(&grad);
    let mut records = vec![IterationRecord {
        k: 0,
        objective: current.value.total,
        grad_norm,
        step: T::zero(),
        displacement: T::zero(),
    }];
    let mut k = 0;
    let reason = loop {
        if grad_norm < stopping.min_grad_norm {
            break TerminationReason::MinGradNorm;
        }
        if k >= stopping.max_iterations {
            break TerminationReason::MaxIter;
        }
        let accepted = match armijo_step(problem, &current, &grad, armijo) {
            Ok(s) => s,
            Err(Error::BacktrackFail { .. }) => break TerminationReason::BacktrackFail,
            Err(e) => return Err(e.context(format!("iteration {}", k + 1))),
        };
        k += 1;
        let displacement = current.pack.displacement(&accepted.next.pack)?;
        current = accepted.next;
        grad = current.gradient(problem).map_err(|e| e.context(format!("gradient at iteration {k}")))?;
        grad_norm = product_norm(&grad);
        records.push(IterationRecord {
            k,
            objective: current.value.total,
            grad_norm,
            step: accepted.step,
            displacement,
        });
        if displacement < stopping.min_change {
            break TerminationReason::MinChange;
        }
    };
    Ok(Solution { pack: current.pack.clone(), value: current.value, trace: SolverTrace { records, reason } })
}

/// Fits from the default initialization with default parameters for the
/// problem's manifold.
pub fn solve<T: Real>(problem: &FittingProblem<T>) -> Result<(crate::bezier::CompositeBezier<T>, SolverTrace<T>)> {
    let init = problem.default_initialization()?;
    let sol = gradient_descent(
        problem,
        &init,
        &ArmijoParams::default(),
        &StoppingCriteria::for_manifold(problem.manifold()),
    )?;
    Ok((sol.pack.unpack()?, sol.trace))
}
