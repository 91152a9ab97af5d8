use heatgrow_core::analytic::AnalyticSolution;
use heatgrow_core::controller::feedback;
use heatgrow_core::kernel::{
    forward_transform, inverse_transform, kernel_bound_check, kernel_pde_residual, p_kernel,
    q_kernel, KernelParams,
};
use heatgrow_core::{BoundaryCurve, FieldState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn params(lambda: f64) -> KernelParams {
    KernelParams::new(lambda).unwrap()
}

/// On the unit interval; the error constant grows like a power of `e^{√λ l}`.
#[test]
fn round_trip_within_five_h_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let curve = BoundaryCurve::power_law(1.0, 0.5).unwrap();
    let n = 100;
    let h = 1.0 / n as f64;
    for case in 0..50 {
        let lambda = [1.0, 2.5, 6.5][case % 3];
        let modes: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let values = (0..=n)
            .map(|i| {
                let y = i as f64 * h;
                modes
                    .iter()
                    .enumerate()
                    .map(|(m, c)| c * (PI * (m + 1) as f64 * y).sin())
                    .sum::<f64>()
                    + modes[0] * y
            })
            .collect();
        let u = FieldState::new(curve, 0.0, values).unwrap();
        let back = inverse_transform(&forward_transform(&u, &params(lambda)).unwrap(), &params(lambda)).unwrap();
        let err = u
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 5.0 * h * h, "case {case}: lambda {lambda} err {err}");
    }
}

#[test]
fn forward_transform_self_converges() {
    let sol = AnalyticSolution::new(1.0, 0.5).unwrap();
    let curve = BoundaryCurve::power_law(1.0, 0.5).unwrap();
    let transform = |n: usize| {
        let u = FieldState::new(curve, 0.0, sol.initial_grid(n)).unwrap();
        forward_transform(&u, &params(1.0)).unwrap()
    };
    let (w1, w2, w4) = (transform(200), transform(400), transform(800));
    let diff = |a: &FieldState, b: &FieldState| {
        (0..a.values.len())
            .map(|i| (a.values[i] - b.values[2 * i]).abs())
            .fold(0.0, f64::max)
    };
    let ratio = diff(&w1, &w2) / diff(&w2, &w4);
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn exponential_bound_on_every_triangle() {
    for lambda in [0.5, 1.0, 6.5, 25.0] {
        for l in [1.0, 2.0, 5.0] {
            let b = kernel_bound_check(&params(lambda), l).unwrap();
            assert!(b.holds(), "lambda {lambda} l {l}: {b:?}");
        }
    }
    let b = kernel_bound_check(&params(1.0), 1.0).unwrap();
    assert!((b.bound - std::f64::consts::E).abs() < 1e-15);
    let b = kernel_bound_check(&params(4.0), 2.0).unwrap();
    assert!((b.bound - 2.0 * 4f64.exp()).abs() < 1e-12);
}

#[test]
fn pde_residual_second_order() {
    for lambda in [1.0, 6.5] {
        let coarse = kernel_pde_residual(&params(lambda), 64).unwrap();
        let fine = kernel_pde_residual(&params(lambda), 128).unwrap();
        for (c, f) in [(coarse.p_residual, fine.p_residual), (coarse.q_residual, fine.q_residual)] {
            let ratio = c / f;
            assert!((3.5..4.5).contains(&ratio), "lambda {lambda}: ratio {ratio}");
        }
        if lambda == 6.5 {
            assert!(fine.p_residual < 1e-2 * lambda * lambda);
            assert!(fine.q_residual < 1e-2 * lambda * lambda);
        }
    }
}

#[test]
fn feedback_matches_quadrature_oracle() {
    // −∫₀¹ p(1, y) sin(πy) dy at λ = 1 by adaptive high-precision quadrature
    let curve = BoundaryCurve::Sinusoidal;
    let s = FieldState::from_fn(curve, 800, |y| (PI * y).sin()).unwrap();
    assert!((s.length() - 1.0).abs() < 1e-15);
    let u = feedback(&s, &params(1.0)).unwrap();
    assert!((u + 0.171_604_026_750_516_6).abs() < 1e-5, "{u}");
}

proptest! {
    #[test]
    fn diagonal_and_axis_values(lambda in 1e-6f64..50.0, x in 0.0f64..5.0) {
        let p = params(lambda);
        prop_assert_eq!(p_kernel(&p, x, x).unwrap(), lambda * x / 2.0);
        prop_assert_eq!(q_kernel(&p, x, x).unwrap(), lambda * x / 2.0);
        prop_assert_eq!(p_kernel(&p, x, 0.0).unwrap(), 0.0);
        prop_assert_eq!(q_kernel(&p, x, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn truncation_is_converged(lambda in 0.1f64..30.0, x in 0.0f64..5.0, frac in 0.0f64..1.0) {
        let y = x * frac;
        let base = params(lambda);
        let long = KernelParams { max_terms: 2000, ..base };
        for f in [p_kernel, q_kernel] {
            let a = f(&base, x, y).unwrap();
            let b = f(&long, x, y).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn transforms_are_linear(c in -5.0f64..5.0, m in 1usize..5) {
        let curve = BoundaryCurve::power_law(1.0, 0.5).unwrap();
        let u = FieldState::from_fn(curve, 64, |y| (PI * m as f64 * y).sin()).unwrap();
        let w = forward_transform(&u, &params(6.5)).unwrap();
        let wc = forward_transform(&u.scaled(c), &params(6.5)).unwrap();
        for (a, b) in w.values.iter().zip(&wc.values) {
            prop_assert!((b - c * a).abs() <= 1e-12 * (1.0 + (c * a).abs()));
        }
    }
}
