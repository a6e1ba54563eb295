mod common;

use common::{c, r, sample};
use hillspec_core::fit::{decay_fit, weighted_sum, ResidualReport};
use hillspec_core::schrodinger::{
    analytic_continuation_check, kappa_residual_sequence, leading_sign_estimate, midpoint_residual_sequence,
    spectral_table, KAPPA_LEADING_SIGN,
};
use hillspec_core::{Error, FourierFunction};

fn as_pairs(seq: &hillspec_core::WeightedSequence) -> Vec<(u32, f64)> {
    seq.iter().map(|(k, v)| (k as u32, v.norm())).collect()
}

#[test]
fn zero_potential_residuals_vanish() {
    let zero = FourierFunction::zero(0);
    let k = kappa_residual_sequence(&zero, 1..=16, 1e-12).unwrap();
    assert!(k.iter().all(|(_, v)| v.norm() <= 1e-12));
    let m = midpoint_residual_sequence(&zero, 1..=16, 1e-12).unwrap();
    assert!(m.iter().all(|(_, v)| v.norm() <= 1e-9));
}

#[test]
fn sine_residual_is_setting_independent() {
    let q = FourierFunction::sine(1, 1.0).unwrap();
    let coarse = kappa_residual_sequence(&q, 1..=1, 1e-9).unwrap().get(1);
    let fine = kappa_residual_sequence(&q, 1..=1, 1e-13).unwrap().get(1);
    assert!((coarse - fine).norm() <= 1e-9, "{coarse} vs {fine}");
    // the residual itself is a genuine second-order effect, not noise
    assert!(fine.norm() > 1e-6);
}

#[test]
fn midpoint_residual_is_second_order() {
    let q = FourierFunction::cosine(1, 1e-3).unwrap();
    let m = midpoint_residual_sequence(&q, 1..=1, 1e-12).unwrap().get(1);
    assert!(m.norm() <= 1e-5, "{m}");
    let q2 = FourierFunction::cosine(1, 2e-3).unwrap();
    let m2 = midpoint_residual_sequence(&q2, 1..=1, 1e-12).unwrap().get(1);
    assert!(m2.norm() <= 4e-5, "{m2}");
}

#[test]
fn sign_is_recorded_and_confirmed() {
    let q0 = sample(0.0, 1.0, 5, 3);
    for n in 1..=5 {
        let ratio = leading_sign_estimate(&q0, n, 1e-13).unwrap();
        assert!((ratio - KAPPA_LEADING_SIGN).abs() < 1e-3, "n {n}: {ratio}");
    }
    let table = spectral_table(&q0, 1..=3, 1e-12).unwrap();
    assert_eq!(table.sign, KAPPA_LEADING_SIGN);
}

#[test]
fn table_agrees_with_sequences() {
    let q = sample(1.0, 1.0, 8, 21);
    let table = spectral_table(&q, 1..=12, 1e-12).unwrap();
    let kap = kappa_residual_sequence(&q, 1..=12, 1e-12).unwrap();
    let mid = midpoint_residual_sequence(&q, 1..=12, 1e-12).unwrap();
    for rec in &table.records {
        assert!(rec.kappa_valid);
        assert!((rec.r_kappa - kap.get(rec.n as i64).re).abs() <= 1e-12);
        assert!((rec.r_mid - mid.get(rec.n as i64).re).abs() <= 1e-12);
        assert!(rec.lam_minus <= rec.mu + rec.est_error.max(1e-9) || rec.lam_minus <= rec.lam_plus);
    }
    assert!(table.lambda0 < table.records[0].lam_minus);
    assert!(spectral_table(&q, 0..=3, 1e-12).is_err());
}

#[test]
fn smooth_potential_weighted_sums_settle() {
    for seed in 0..3 {
        let q = sample(3.0, 1.0, 6, 60 + seed);
        let kap = as_pairs(&kappa_residual_sequence(&q, 1..=48, 1e-13).unwrap());
        let mid = as_pairs(&midpoint_residual_sequence(&q, 1..=48, 1e-13).unwrap());
        for big_n in [0.0, 1.0, 2.0] {
            for res in [&kap, &mid] {
                let short = weighted_sum(res, big_n, 0, 32);
                let long = weighted_sum(res, big_n, 0, 48);
                assert!(long.is_finite() && long >= short);
                assert!(long - short <= 0.05 * long, "N = {big_n}: {short} -> {long}");
            }
        }
    }
}

#[test]
fn complex_potential_kappa_residuals() {
    let q = sample(1.0, 1.0, 4, 8);
    let shifted = q.add_scaled(c(0.0, 0.2), &FourierFunction::sine(1, 1.0).unwrap());
    let seq = kappa_residual_sequence(&shifted, 1..=8, 1e-12).unwrap();
    assert_eq!(seq.len(), 8);
    // a purely real direction reproduces the real path exactly
    let real_path = kappa_residual_sequence(&q, 1..=8, 1e-12).unwrap();
    let zero = FourierFunction::zero(4);
    let (cont, m) = hillspec_core::schrodinger::continue_dirichlet(&zero, &q, 3, 1e-12).unwrap();
    assert!(cont.mu.im.abs() <= 1e-10 && m.y2.norm() <= 1e-10);
    assert!(real_path.iter().all(|(_, v)| v.im == 0.0));
}

#[test]
fn invalid_kappa_is_reported() {
    // a strong potential pushes (-1)^n y1 far from 1 at low n
    let q = FourierFunction::sine(1, 60.0).unwrap();
    match kappa_residual_sequence(&q, 1..=1, 1e-12) {
        Err(Error::InvalidKappa { n: 1, distance }) => assert!(distance > 0.5),
        other => panic!("{other:?}"),
    }
}

#[test]
fn continuation_from_zero_in_cosine_direction() {
    let zero = FourierFunction::zero(1);
    let dir = FourierFunction::cosine(1, 2.0).unwrap();
    let report = analytic_continuation_check(&zero, &dir, 0.5, 1..=16, 1e-12).unwrap();
    assert!(report.n_r < 16);
    for e in report.entries.iter().filter(|e| e.n > report.n_r) {
        assert!(e.all_valid());
        assert!(e.defect <= 1e-8, "n {}: defect {}", e.n, e.defect);
    }
    assert!(report.max_defect_above(report.n_r) <= 1e-8);
}

#[test]
fn continuation_defect_shrinks_with_radius() {
    let q0 = sample(0.0, 1.0, 3, 12);
    let dir = FourierFunction::cosine(2, 2.0).unwrap().add_scaled(r(1.0), &FourierFunction::sine(1, 1.0).unwrap());
    let big = analytic_continuation_check(&q0, &dir, 2.0, 1..=3, 1e-13).unwrap();
    let small = analytic_continuation_check(&q0, &dir, 1.0, 1..=3, 1e-13).unwrap();
    for (b, s) in big.entries.iter().zip(&small.entries) {
        // at least quadratic in ρ, down to rounding
        assert!(s.defect <= b.defect / 4.0 + 1e-12, "n {}: {} then {}", b.n, b.defect, s.defect);
    }
    assert!(analytic_continuation_check(&dir, &dir, 0.5, 1..=1, 1e-12).is_ok());
    let complex = FourierFunction::exponential(1, c(1.0, 0.0)).unwrap();
    assert!(analytic_continuation_check(&complex, &dir, 0.5, 1..=1, 1e-12).is_err());
}

#[test]
fn synthetic_fits() {
    let cubic: Vec<(u32, f64)> = (1..=64).map(|n| (n, (n as f64).powi(-3))).collect();
    let fit = decay_fit(&cubic, 4, 1e-300).unwrap();
    assert!((fit.slope.unwrap() + 3.0).abs() <= 1e-10);
    let zeros: Vec<(u32, f64)> = (1..=64).map(|n| (n, 0.0)).collect();
    assert_eq!(decay_fit(&zeros, 4, 1e-13).unwrap().slope, None);
    assert!(matches!(
        decay_fit(&cubic[..10], 4, 1e-13),
        Err(Error::InsufficientPoints { needed: 8, got: 6 })
    ));
    let report = ResidualReport::build(1.0, 4, 1e-300, vec![(0, cubic.clone()), (1, cubic)]).unwrap();
    assert!(report.split_holds() && report.sup_weighted_sum > 0.0);
}
