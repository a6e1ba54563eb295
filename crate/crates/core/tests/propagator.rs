mod common;

use common::{c, r, rk4_richardson, sample};
use hillspec_core::schrodinger::{discriminant, fundamental_solution};
use hillspec_core::{Complex64, Error, FourierFunction, SobolevIndex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn max_entry_gap(m: &hillspec_core::FundamentalMatrix, reference: [Complex64; 4]) -> f64 {
    [m.y1, m.y2, m.dy1, m.dy2]
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

#[test]
fn free_closed_forms_at_special_points() {
    let zero = FourierFunction::zero(0);
    let m = fundamental_solution(&zero, r(std::f64::consts::PI.powi(2)), 1e-12).unwrap();
    assert!((m.y1 + 1.0).norm() < 1e-12 && m.y2.norm() < 1e-12 && (m.dy2 + 1.0).norm() < 1e-12);
    let m = fundamental_solution(&zero, r(0.0), 1e-12).unwrap();
    assert!((m.y1 - 1.0).norm() < 1e-13 && (m.y2 - 1.0).norm() < 1e-13);
    assert!(m.dy1.norm() < 1e-13 && (m.dy2 - 1.0).norm() < 1e-13);
}

#[test]
fn free_closed_forms_on_a_grid() {
    let zero = FourierFunction::zero(0);
    for i in 0..60 {
        for im in [0.0, -3.0, 7.5] {
            let lambda = c(-50.0 + 70.0 * i as f64, im);
            let m = fundamental_solution(&zero, lambda, 1e-12).unwrap();
            let nu = lambda.sqrt();
            let y2 = if nu.norm() == 0.0 { r(1.0) } else { nu.sin() / nu };
            let close = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-10 * b.norm().max(1.0);
            assert!(close(m.y1, nu.cos()), "lambda {lambda}");
            assert!(close(m.y2, y2), "lambda {lambda}");
            assert!(close(m.dy2, nu.cos()), "lambda {lambda}");
            assert!(close(m.dy1, -nu * nu.sin()), "lambda {lambda}");
        }
    }
}

#[test]
fn matches_richardson_reference() {
    let q = FourierFunction::cosine(1, 1.2).unwrap();
    let reference = rk4_richardson(&q, r(9.0), 4000);
    for tol in [1e-7, 1e-9, 1e-11] {
        let m = fundamental_solution(&q, r(9.0), tol).unwrap();
        let gap = max_entry_gap(&m, reference);
        assert!(gap <= 10.0 * tol, "tol {tol}: gap {gap}");
    }
}

#[test]
fn matches_reference_for_complex_data() {
    let q = sample(0.0, 2.0, 5, 4).add_scaled(c(0.0, 0.7), &FourierFunction::sine(2, 1.0).unwrap());
    for lambda in [c(30.0, 4.0), c(-20.0, -2.0), c(400.0, 9.0)] {
        let reference = rk4_richardson(&q, lambda, 6000);
        let m = fundamental_solution(&q, lambda, 1e-11).unwrap();
        let size = [m.y1, m.y2 * lambda.sqrt(), m.dy1 / lambda.sqrt(), m.dy2].iter().map(|v| v.norm()).fold(1.0, f64::max);
        let gap = max_entry_gap(&m, reference);
        assert!(gap <= 1e-9 * size * lambda.norm().sqrt().max(1.0), "lambda {lambda}: gap {gap}");
    }
}

#[test]
fn wronskian_on_random_pairs() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let norm = rng.gen_range(0.1..5.0);
        let k = rng.gen_range(1..=12);
        let q = sample(0.0, norm / 0.95, k, i);
        // Re λ ≥ 0: for Re λ ≪ 0 the entries grow like e^{√|λ|} and det = 1 is
        // lost to cancellation in any floating-point solution
        let im = if i % 2 == 0 { 0.0 } else { rng.gen_range(-10.0..10.0) };
        let lambda = c(rng.gen_range(0.0..4200.0), im);
        let m = fundamental_solution(&q, lambda, 1e-12).unwrap();
        let defect = (m.wronskian() - 1.0).norm();
        worst = worst.max(defect);
        assert!(defect <= f64::max(1e-10, 10.0 * m.est_error), "lambda {lambda}: {defect}");
    }
    assert!(worst <= 1e-10);
}

#[test]
fn free_discriminant() {
    let zero = FourierFunction::zero(0);
    for i in 0..200 {
        let lambda = -20.0 + 25.0 * i as f64;
        let d = discriminant(&zero, r(lambda), 1e-12).unwrap();
        assert!((d - r(lambda).sqrt().cos() * 2.0).norm() <= 1e-9, "lambda {lambda}");
    }
    let d = discriminant(&zero, r(std::f64::consts::PI.powi(2)), 1e-12).unwrap();
    assert!((d + 2.0).norm() < 1e-12);
}

#[test]
fn y1_obeys_the_large_nu_estimate() {
    // |y1(1, ν²) - cos ν| ≤ exp(|Im ν| + ‖q‖₀) / |ν|
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for i in 0..40 {
        let q = sample(0.0, rng.gen_range(0.2..5.0), 6, i);
        let nu = c(rng.gen_range(5.0..60.0), rng.gen_range(-2.0..2.0));
        let m = fundamental_solution(&q, nu * nu, 1e-11).unwrap();
        let bound = (nu.im.abs() + q.sobolev_norm(SobolevIndex::ZERO)).exp() / nu.norm();
        assert!((m.y1 - nu.cos()).norm() <= bound, "nu {nu}");
    }
}

#[test]
fn rejects_bad_tolerances_and_runaway_lambda() {
    let q = FourierFunction::cosine(1, 1.0).unwrap();
    assert!(matches!(fundamental_solution(&q, r(1.0), 1e-3), Err(Error::InvalidArgument(_))));
    assert!(matches!(fundamental_solution(&q, r(1.0), 1e-15), Err(Error::InvalidArgument(_))));
    assert!(matches!(fundamental_solution(&q, r(1e13), 1e-12), Err(Error::StepLimit { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn agrees_with_reference_on_random_input(seed in any::<u64>(), k in 1usize..5, re in -50.0..600.0f64, im in -10.0..10.0f64) {
        let q = sample(0.5, 3.0, k, seed);
        let lambda = c(re, im);
        let m = fundamental_solution(&q, lambda, 1e-10).unwrap();
        let reference = rk4_richardson(&q, lambda, 3000);
        let scale = lambda.norm().sqrt().max(1.0);
        let size = [m.y1, m.y2, m.dy1, m.dy2].iter().map(|v| v.norm()).fold(1.0, f64::max);
        prop_assert!(max_entry_gap(&m, reference) <= 1e-8 * size * scale);
        prop_assert!((m.wronskian() - 1.0).norm() <= 1e-10);
    }
}
