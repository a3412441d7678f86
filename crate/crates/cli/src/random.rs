//! Seeded random problems for `gradcheck` without a config file.

use mbezier::{FittingProblem, Lambda, Manifold, Point, TangentVector, VariablePack};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_tangent(rng: &mut ChaCha8Rng, m: Manifold, x: &Point<f64>, len: f64) -> anyhow::Result<TangentVector<f64>> {
    let mut v = m.zero_tangent();
    for e in m.tangent_basis(x)? {
        v.axpy(rng.gen_range(-1.0..1.0), &e);
    }
    let n = v.norm();
    Ok(if n > 0.0 { v.scaled(len / n) } else { v })
}

/// A problem with 1–3 segments of degree 2–4 whose data points are a short
/// random walk, and a perturbed default initialization.
pub fn problem(m: Manifold, seed: u64) -> anyhow::Result<(FittingProblem<f64>, VariablePack<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let degree = rng.gen_range(2..=4);
    let mut data = vec![m.base_point()];
    for _ in 0..n {
        let last = data.last().expect("non-empty");
        let len = rng.gen_range(0.3..1.0);
        let v = random_tangent(&mut rng, m, last, len)?;
        data.push(m.exp(last, &v)?);
    }
    let lambda = if rng.gen_bool(0.3) { Lambda::Infinite } else { Lambda::Finite(rng.gen_range(0.5..20.0)) };
    let intervals = n * rng.gen_range(4..=8);
    let problem = FittingProblem::new(m, degree, data, lambda, intervals)?;
    let init = problem.default_initialization()?;
    let mut pts = init.points.clone();
    for p in pts.iter_mut() {
        let len = rng.gen_range(0.0..0.15);
        let v = random_tangent(&mut rng, m, p, len)?;
        *p = m.exp(p, &v)?;
    }
    Ok((problem, init.with_points(pts)?))
}
