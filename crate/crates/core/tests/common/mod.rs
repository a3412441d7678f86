#![allow(dead_code)]

use mbezier::{FittingProblem, Lambda, Manifold, Point, TangentVector, VariablePack};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn manifolds() -> [Manifold; 4] {
    [Manifold::euclidean(3), Manifold::sphere(2), Manifold::sphere(3), Manifold::Rotations3]
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    // Box-Muller is plenty for test inputs
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(1e-12..1.0);
            let v: f64 = rng.gen();
            (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
        })
        .collect()
}

/// Tangent vector at `x` with standard normal coordinates.
pub fn random_tangent(m: Manifold, rng: &mut ChaCha8Rng, x: &Point<f64>) -> TangentVector<f64> {
    let v = TangentVector::new(gaussian_vec(rng, m.tangent_len()));
    m.project_tangent(x, &v)
}

/// Tangent vector at `x` with norm uniform in `(0, max_norm)`.
pub fn random_tangent_within(m: Manifold, rng: &mut ChaCha8Rng, x: &Point<f64>, max_norm: f64) -> TangentVector<f64> {
    let v = random_tangent(m, rng, x);
    let r: f64 = rng.gen_range(0.05..1.0) * max_norm;
    v.scaled(r / v.norm())
}

pub fn random_point(m: Manifold, rng: &mut ChaCha8Rng) -> Point<f64> {
    match m {
        Manifold::Euclidean { dim } => Point::new(gaussian_vec(rng, dim)),
        Manifold::Sphere { dim } => {
            let v = gaussian_vec(rng, dim + 1);
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            Point::new(v.into_iter().map(|c| c / n))
        }
        Manifold::Rotations3 => {
            let base = m.base_point();
            let w = random_tangent_within(m, rng, &base, 3.0);
            m.exp(&base, &w).unwrap()
        }
    }
}

/// A point at distance below `max_dist` from `x`.
pub fn random_near(m: Manifold, rng: &mut ChaCha8Rng, x: &Point<f64>, max_dist: f64) -> Point<f64> {
    let v = random_tangent_within(m, rng, x, max_dist);
    m.exp(x, &v).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random-walk data with steps below 1, a random weight (or interpolation)
/// and the default initialisation perturbed by up to 0.2.
pub fn random_problem(m: Manifold, seed: u64, interpolate: bool) -> (FittingProblem<f64>, VariablePack<f64>) {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let degree = r.gen_range(2..=4);
    let mut data = vec![random_point(m, &mut r)];
    for _ in 0..n {
        let next = random_near(m, &mut r, data.last().unwrap(), 1.0);
        data.push(next);
    }
    let lambda = if interpolate { Lambda::Infinite } else { Lambda::Finite(r.gen_range(0.0..20.0)) };
    let intervals = n * r.gen_range(4..=10);
    let problem = FittingProblem::new(m, degree, data, lambda, intervals).unwrap();
    let init = problem.default_initialization().unwrap();
    let pts = init.points.iter().map(|x| random_near(m, &mut r, x, 0.2)).collect();
    (problem, init.with_points(pts).unwrap())
}
