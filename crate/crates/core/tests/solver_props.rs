mod common;

use common::*;
use mbezier::{
    gradient_descent, ArmijoParams, Decrease, FittingProblem, Lambda, Manifold, Point, StoppingCriteria,
    TerminationReason, VariablePack,
};
use proptest::prelude::*;
use rand::Rng;

fn random_problem(m: Manifold, seed: u64) -> (FittingProblem<f64>, VariablePack<f64>) {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let mut data = vec![random_point(m, &mut r)];
    for _ in 0..n {
        let next = random_near(m, &mut r, data.last().unwrap(), 1.0);
        data.push(next);
    }
    let lambda = if r.gen_bool(0.3) { Lambda::Infinite } else { Lambda::Finite(r.gen_range(0.1..20.0)) };
    let problem = FittingProblem::new(m, r.gen_range(2..=4), data, lambda, n * 12).unwrap();
    let init = problem.default_initialization().unwrap();
    let pts = init.points.iter().map(|x| random_near(m, &mut r, x, 0.3)).collect();
    (problem, init.with_points(pts).unwrap())
}

fn short_run() -> StoppingCriteria<f64> {
    StoppingCriteria { max_iterations: 40, min_change: 1e-12, min_grad_norm: 1e-9 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn objective_decreases_every_step(seed in any::<u64>()) {
        for m in manifolds() {
            let (problem, init) = random_problem(m, seed);
            for decrease in [Decrease::SquaredNorm, Decrease::Norm] {
                let armijo = ArmijoParams { decrease, ..ArmijoParams::default() };
                let sol = gradient_descent(&problem, &init, &armijo, &short_run()).unwrap();
                prop_assert!(sol.trace.is_monotone(), "{m:?} {decrease:?}");
                prop_assert!(sol.value.total <= sol.trace.initial_objective());
                prop_assert!(sol.pack.unpack().unwrap().is_c1().unwrap());
            }
        }
    }
}

#[test]
fn two_point_interpolation_becomes_a_geodesic() {
    for m in [Manifold::euclidean(2), Manifold::sphere(2)] {
        let mut r = rng(9);
        let a = random_point(m, &mut r);
        let b = random_near(m, &mut r, &a, 1.2);
        let problem = FittingProblem::new(m, 3, vec![a.clone(), b.clone()], Lambda::Infinite, 20).unwrap();
        let init = problem.default_initialization().unwrap();
        let pts: Vec<Point<f64>> = init.points.iter().map(|x| random_near(m, &mut r, x, 0.3)).collect();
        let init = init.with_points(pts).unwrap();
        let stop = StoppingCriteria { max_iterations: 20_000, ..StoppingCriteria::for_manifold(m) };
        let sol = gradient_descent(&problem, &init, &ArmijoParams::default(), &stop).unwrap();
        assert!(sol.value.msa < 1e-6, "{m:?}: {}", sol.value.msa);
        let curve = sol.pack.unpack().unwrap();
        // every sample sits on the geodesic through the data
        let len = m.dist(&a, &b).unwrap();
        for k in 0..=10 {
            let p = curve.eval(k as f64 / 10.0).unwrap();
            let off = m.dist(&a, &p).unwrap() + m.dist(&p, &b).unwrap() - len;
            assert!(off < 1e-4, "{m:?} sample {k}: {off}");
        }
    }
}

#[test]
fn stopping_reasons() {
    let (problem, init) = random_problem(Manifold::sphere(2), 4);
    let stop = StoppingCriteria { max_iterations: 3, min_change: 0.0, min_grad_norm: 0.0 };
    let sol = gradient_descent(&problem, &init, &ArmijoParams::default(), &stop).unwrap();
    assert_eq!(sol.trace.reason, TerminationReason::MaxIter);
    assert_eq!(sol.trace.iterations(), 3);

    let stop = StoppingCriteria { max_iterations: 3, min_change: 0.0, min_grad_norm: f64::INFINITY };
    let sol = gradient_descent(&problem, &init, &ArmijoParams::default(), &stop).unwrap();
    assert_eq!(sol.trace.reason, TerminationReason::MinGradNorm);
    assert_eq!(sol.trace.iterations(), 0);

    let stop = StoppingCriteria { max_iterations: 3, min_change: f64::INFINITY, min_grad_norm: 0.0 };
    let sol = gradient_descent(&problem, &init, &ArmijoParams::default(), &stop).unwrap();
    assert_eq!(sol.trace.reason, TerminationReason::MinChange);
    assert_eq!(sol.trace.iterations(), 1);

    let armijo = ArmijoParams { max_backtracks: 1, alpha: 1e6, ..ArmijoParams::default() };
    let sol = gradient_descent(&problem, &init, &armijo, &StoppingCriteria::curved()).unwrap();
    assert_eq!(sol.trace.reason, TerminationReason::BacktrackFail);
    assert_eq!(sol.pack, init);
}

#[test]
fn runs_are_deterministic_and_displacement_is_reported() {
    let (problem, init) = random_problem(Manifold::Rotations3, 21);
    let a = gradient_descent(&problem, &init, &ArmijoParams::default(), &short_run()).unwrap();
    let b = gradient_descent(&problem, &init, &ArmijoParams::default(), &short_run()).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.pack, b.pack);

    let one = StoppingCriteria { max_iterations: 1, min_change: 0.0, min_grad_norm: 0.0 };
    let sol = gradient_descent(&problem, &init, &ArmijoParams::default(), &one).unwrap();
    let expected = init.displacement(&sol.pack).unwrap();
    assert_eq!(sol.trace.records[1].displacement, expected);
}

#[test]
fn gradient_norm_stop_is_a_stationary_point() {
    let m = Manifold::sphere(2);
    let (problem, init) = random_problem(m, 33);
    let stop = StoppingCriteria { max_iterations: 50_000, min_change: 0.0, min_grad_norm: 1e-5 };
    let sol = gradient_descent(&problem, &init, &ArmijoParams::default(), &stop).unwrap();
    assert_eq!(sol.trace.reason, TerminationReason::MinGradNorm);
    let mut r = rng(34);
    let h = 1e-6;
    for _ in 0..5 {
        let mut dir: Vec<_> = sol.pack.points.iter().map(|x| random_tangent(m, &mut r, x)).collect();
        let norm = dir.iter().map(|v| v.dot(v)).sum::<f64>().sqrt();
        dir.iter_mut().for_each(|v| *v = v.scaled(1.0 / norm));
        let f = |s: f64| problem.objective(&sol.pack.retract(&dir, s).unwrap()).unwrap().total;
        let slope = (f(h) - f(-h)) / (2.0 * h);
        assert!(slope.abs() <= 10.0 * stop.min_grad_norm, "slope {slope:e}");
    }
}

#[test]
fn single_precision_fit_tracks_double() {
    fn fit<T: mbezier::scalar::Real>() -> f64 {
        let c = |v: [f64; 3]| Point::new(v.map(T::lit));
        let data = vec![c([0.0, 0.0, 1.0]), c([0.0, 1.0, 0.0]), c([1.0, 0.0, 0.0])];
        let problem = FittingProblem::new(Manifold::sphere(2), 3, data, Lambda::Finite(T::lit(5.0)), 24).unwrap();
        let init = problem.default_initialization().unwrap();
        let stop = StoppingCriteria { max_iterations: 200, min_change: T::lit(0.0), min_grad_norm: T::lit(1e-4) };
        let sol = gradient_descent(&problem, &init, &ArmijoParams::default(), &stop).unwrap();
        assert!(sol.trace.is_monotone());
        sol.value.total.as_f64()
    }
    let (single, double) = (fit::<f32>(), fit::<f64>());
    assert!((single - double).abs() <= 1e-3 * double, "{single} vs {double}");
}
