mod common;

use common::*;
use mbezier::{Manifold, Point};
use proptest::prelude::*;
use rand::Rng;

fn instance(m: Manifold, seed: u64) -> (Point<f64>, Point<f64>, f64) {
    let mut r = rng(seed);
    let x = random_point(m, &mut r);
    let y = random_near(m, &mut r, &x, 2.5);
    let t = r.gen_range(0.0..1.0);
    (x, y, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exp_log_roundtrip(seed in any::<u64>()) {
        for m in manifolds() {
            let mut r = rng(seed);
            let x = random_point(m, &mut r);
            let v = random_tangent_within(m, &mut r, &x, 0.9 * m.injectivity_radius::<f64>().min(10.0));
            let back = m.log(&x, &m.exp(&x, &v).unwrap()).unwrap();
            prop_assert!(max_abs_diff(back.coords(), v.coords()) <= 1e-9, "{m:?}");
            let y = m.exp(&x, &v).unwrap();
            prop_assert!((m.dist(&x, &y).unwrap() - v.norm()).abs() <= 1e-9);
        }
    }

    #[test]
    fn jacobi_boundary_values(seed in any::<u64>()) {
        for m in manifolds() {
            let (x, y, _) = instance(m, seed);
            let mut r = rng(seed ^ 1);
            let eta = random_tangent(m, &mut r, &x);
            let j0 = m.jacobi_field(&x, &y, 0.0, &eta).unwrap();
            prop_assert!(max_abs_diff(j0.coords(), eta.coords()) <= 1e-14);
            prop_assert!(m.jacobi_field(&x, &y, 1.0, &eta).unwrap().norm() <= 1e-12);
            let eta_y = random_tangent(m, &mut r, &y);
            prop_assert!(m.jacobi_field_reversed(&x, &y, 0.0, &eta_y).unwrap().norm() <= 1e-12);
        }
    }

    #[test]
    fn adjoint_identities(seed in any::<u64>()) {
        for m in manifolds() {
            let (x, y, t) = instance(m, seed);
            let mut r = rng(seed ^ 2);
            let g = m.geodesic(&x, &y, t).unwrap();
            let eta = random_tangent(m, &mut r, &x);
            let eta_y = random_tangent(m, &mut r, &y);
            let nu = random_tangent(m, &mut r, &g);
            let lhs = m.jacobi_field(&x, &y, t, &eta).unwrap().dot(&nu);
            let rhs = eta.dot(&m.adjoint_jacobi_field(&x, &y, t, &nu).unwrap());
            prop_assert!((lhs - rhs).abs() <= 1e-10, "{m:?}: {lhs} vs {rhs}");
            let lhs = m.jacobi_field_reversed(&x, &y, t, &eta_y).unwrap().dot(&nu);
            let rhs = eta_y.dot(&m.adjoint_jacobi_field_reversed(&x, &y, t, &nu).unwrap());
            prop_assert!((lhs - rhs).abs() <= 1e-10, "{m:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn frame_sum_matches_grouped_form(seed in any::<u64>()) {
        for m in manifolds() {
            let (x, y, t) = instance(m, seed);
            let mut r = rng(seed ^ 3);
            let eta = random_tangent(m, &mut r, &x);
            let g = m.geodesic(&x, &y, t).unwrap();
            let nu = random_tangent(m, &mut r, &g);
            let frame = m.curvature_frame(&x, &y).unwrap();
            let a = frame.jacobi(t, &eta).unwrap();
            let b = m.jacobi_field(&x, &y, t, &eta).unwrap();
            prop_assert!(max_abs_diff(a.coords(), b.coords()) <= 1e-10, "{m:?}");
            let a = frame.adjoint_jacobi(t, &nu).unwrap();
            let b = m.adjoint_jacobi_field(&x, &y, t, &nu).unwrap();
            prop_assert!(max_abs_diff(a.coords(), b.coords()) <= 1e-10, "{m:?}");
        }
    }

    #[test]
    fn reversed_field_is_forward_field_of_reversed_geodesic(seed in any::<u64>()) {
        for m in manifolds() {
            let (x, y, t) = instance(m, seed);
            let mut r = rng(seed ^ 4);
            let eta = random_tangent(m, &mut r, &y);
            let a = m.jacobi_field_reversed(&x, &y, t, &eta).unwrap();
            let b = m.jacobi_field(&y, &x, 1.0 - t, &eta).unwrap();
            prop_assert!(max_abs_diff(a.coords(), b.coords()) <= 1e-9, "{m:?}");
        }
    }

    #[test]
    fn transport_preserves_inner_products(seed in any::<u64>()) {
        for m in manifolds() {
            let (x, y, _) = instance(m, seed);
            let mut r = rng(seed ^ 5);
            let u = random_tangent(m, &mut r, &x);
            let v = random_tangent(m, &mut r, &x);
            let pu = m.parallel_transport(&x, &y, &u).unwrap();
            let pv = m.parallel_transport(&x, &y, &v).unwrap();
            prop_assert!((pu.dot(&pv) - u.dot(&v)).abs() <= 1e-10);
            m.validate_tangent(&y, &pu).unwrap();
        }
    }
}

/// Jacobi fields against finite differences of geodesic evaluation, both
/// endpoints, including the extrapolated parameter `t = 2`.
#[test]
fn jacobi_matches_finite_differences() {
    let h = 1e-6;
    for m in manifolds() {
        for seed in 0..40u64 {
            let mut r = rng(1000 + seed);
            let x = random_point(m, &mut r);
            let y = random_near(m, &mut r, &x, 1.2);
            for &t in &[0.3, 0.5, 0.9, 2.0] {
                let g = m.geodesic(&x, &y, t).unwrap();
                let eta = random_tangent(m, &mut r, &x);
                let fd = |sign: f64| m.geodesic(&m.exp(&x, &eta.scaled(sign * h)).unwrap(), &y, t).unwrap();
                let diff = m.log(&g, &fd(1.0)).unwrap() - m.log(&g, &fd(-1.0)).unwrap();
                let num = diff.scaled(0.5 / h);
                let j = m.jacobi_field(&x, &y, t, &eta).unwrap();
                assert!(max_abs_diff(num.coords(), j.coords()) <= 1e-5 * (1.0 + j.norm()), "{m:?} t={t}");

                let eta = random_tangent(m, &mut r, &y);
                let fd = |sign: f64| m.geodesic(&x, &m.exp(&y, &eta.scaled(sign * h)).unwrap(), t).unwrap();
                let diff = m.log(&g, &fd(1.0)).unwrap() - m.log(&g, &fd(-1.0)).unwrap();
                let num = diff.scaled(0.5 / h);
                let j = m.jacobi_field_reversed(&x, &y, t, &eta).unwrap();
                assert!(max_abs_diff(num.coords(), j.coords()) <= 1e-5 * (1.0 + j.norm()), "{m:?} t={t} reversed");
            }
        }
    }
}

/// Transported vectors stay parallel: transporting the log direction gives
/// the geodesic velocity at the far end.
#[test]
fn transport_of_velocity_is_velocity() {
    for m in manifolds() {
        let mut r = rng(7);
        for _ in 0..20 {
            let x = random_point(m, &mut r);
            let y = random_near(m, &mut r, &x, 2.0);
            let v = m.log(&x, &y).unwrap();
            let at_y = m.parallel_transport(&x, &y, &v).unwrap();
            let back = m.log(&y, &x).unwrap();
            assert!(max_abs_diff(at_y.coords(), (-back).coords()) <= 1e-10, "{m:?}");
        }
    }
}

#[test]
fn geodesic_has_constant_speed() {
    let h = 1e-5;
    for m in manifolds() {
        let mut r = rng(11);
        for _ in 0..20 {
            let x = random_point(m, &mut r);
            let y = random_near(m, &mut r, &x, 2.5);
            let d = m.dist(&x, &y).unwrap();
            for &t in &[0.1, 0.5, 0.77] {
                let a = m.geodesic(&x, &y, t).unwrap();
                let b = m.geodesic(&x, &y, t + h).unwrap();
                let speed = m.dist(&a, &b).unwrap() / h;
                assert!((speed - d).abs() <= 1e-6 * d.max(1.0), "{m:?}");
            }
        }
    }
}

/// The rotation group has curvature 1/4 on directions orthogonal to the
/// geodesic: a finite-difference second derivative of the Jacobi field
/// checks `J'' = −κ J` for the transverse part.
#[test]
fn rotation_jacobi_solves_the_jacobi_equation() {
    let m = Manifold::Rotations3;
    let x = m.base_point::<f64>();
    let y = m.exp(&x, &mbezier::TangentVector::from_slice(&[0.0, 0.0, 1.7])).unwrap();
    let eta = mbezier::TangentVector::from_slice(&[1.0, 0.0, 0.0]);
    let h = 1e-3;
    let norm_at = |t: f64| m.jacobi_field(&x, &y, t, &eta).unwrap().norm();
    // transverse Jacobi field norms follow a·sin(√κ·d·(1−t))
    let (a, b, c) = (norm_at(0.5 - h), norm_at(0.5), norm_at(0.5 + h));
    let second = (a - 2.0 * b + c) / (h * h);
    let d = 1.7f64;
    assert!((second + 0.25 * d * d * b).abs() < 1e-5);
}

#[test]
fn jacobi_weights_in_f32() {
    let m = Manifold::sphere(2);
    let x: Point<f32> = Point::from_slice(&[0.0, 0.0, 1.0]);
    let y: Point<f32> = Point::from_slice(&[0.0, 1.0, 0.0]);
    let eta = mbezier::TangentVector::from_slice(&[1.0f32, 0.0, 0.0]);
    let j = m.jacobi_field(&x, &y, 0.5, &eta).unwrap();
    assert!((j.coords()[0] - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
}
