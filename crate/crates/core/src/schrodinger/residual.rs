use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use num_complex::Complex64;

use super::dirichlet::solve_real;
use super::periodic::{check_order, EdgeMethod, PeriodicSolver};
use super::{floquet_from_y1, Window};
use crate::propagator::check_tol;
use crate::{Error, FourierFunction, Result, WeightedSequence};

/// Sign `σ` in `2πn κ_n = σ ⟨q, sin 2πnx⟩ + o(1)` under
/// `κ_n = -log((-1)^n y1(1, μ_n))`. Fixed by [`leading_sign_estimate`]; the
/// unit tests pin it.
pub const KAPPA_LEADING_SIGN: f64 = 1.0;

/// Everything computed for one index `n` of a real potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRecord {
    pub n: u32,
    pub mu: f64,
    pub kappa: f64,
    pub kappa_valid: bool,
    pub lam_minus: f64,
    pub lam_plus: f64,
    pub edge_method: EdgeMethod,
    /// `2πn κ_n - σ ⟨q, sin 2πnx⟩`.
    pub r_kappa: f64,
    /// `(λ_n^+ + λ_n^-)/2 - μ_n - ⟨q, cos 2πnx⟩`.
    pub r_mid: f64,
    /// Larger of the integrator estimate and the gap-midpoint estimate.
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTable {
    pub lambda0: f64,
    pub sign: f64,
    pub records: Vec<SpectralRecord>,
}

/// `μ_n`, `κ_n`, `λ_n^±` and both residuals for `n` in `range`, sharing one
/// calibrated mesh per `n`. `λ_0` is computed as well.
pub fn spectral_table(q: &FourierFunction, range: RangeInclusive<u32>, tol: f64) -> Result<SpectralTable> {
    check_tol(tol)?;
    if !q.is_real_symmetric() {
        return Err(Error::invalid("spectral tables are built for real potentials"));
    }
    if *range.start() == 0 {
        return Err(Error::invalid("indices start at 1"));
    }
    let mut solver = PeriodicSolver::new(q, tol);
    let mut records = Vec::new();
    let mut first_minus = None;
    for n in range.clone() {
        let win = Window::new(q, n, tol)?;
        let (mu, m) = solve_real(q, n, tol, &win)?;
        let fl = floquet_from_y1(n, m.y1, true)?;
        let pair = solver.pair(n, &win)?;
        if n == 1 {
            first_minus = Some(pair.lam_minus);
        }
        let mu = mu.mu.re;
        let kappa = fl.kappa.re;
        records.push(SpectralRecord {
            n,
            mu,
            kappa,
            kappa_valid: fl.valid,
            lam_minus: pair.lam_minus,
            lam_plus: pair.lam_plus,
            edge_method: pair.method,
            r_kappa: kappa_residual(q, n, kappa),
            r_mid: pair.midpoint() - mu - q.cosine_coefficient(n).re,
            est_error: win.est.max(pair.midpoint_error),
        });
    }
    let first = match first_minus {
        Some(v) => v,
        None => solver.pair(1, &Window::new(q, 1, tol)?)?.lam_minus,
    };
    let lambda0 = solver.lambda0(first)?;
    if *range.start() == 1 {
        check_order(lambda0, records.iter().map(|r| (r.n, r.lam_minus, r.lam_plus)))?;
    }
    Ok(SpectralTable {
        lambda0,
        sign: KAPPA_LEADING_SIGN,
        records,
    })
}

fn kappa_residual(q: &FourierFunction, n: u32, kappa: f64) -> f64 {
    2.0 * PI * n as f64 * kappa - KAPPA_LEADING_SIGN * q.sine_coefficient(n).re
}

/// `(2πn κ_n - σ ⟨q, sin 2πnx⟩)` embedded at `k = n`.
///
/// Every `κ_n` in the range must satisfy the validity criterion.
pub fn kappa_residual_sequence(q: &FourierFunction, range: RangeInclusive<u32>, tol: f64) -> Result<WeightedSequence> {
    check_tol(tol)?;
    let mut out = WeightedSequence::new();
    for n in range {
        let (kappa, valid, distance) = if q.is_real_symmetric() {
            let win = Window::new(q, n, tol)?;
            let (_, m) = solve_real(q, n, tol, &win)?;
            let fl = floquet_from_y1(n, m.y1, true)?;
            (fl.kappa, fl.valid, fl.distance)
        } else {
            let zero = FourierFunction::zero(q.max_freq());
            let (_, m) = super::continue_dirichlet(&zero, q, n, tol)?;
            let fl = floquet_from_y1(n, m.y1, false)?;
            (fl.kappa, fl.valid, fl.distance)
        };
        if !valid {
            return Err(Error::InvalidKappa { n, distance });
        }
        let r = kappa * (2.0 * PI * n as f64) - q.sine_coefficient(n) * KAPPA_LEADING_SIGN;
        out.set(n as i64, r);
    }
    Ok(out)
}

/// `((λ_n^+ + λ_n^-)/2 - μ_n - ⟨q, cos 2πnx⟩)` embedded at `k = n`.
pub fn midpoint_residual_sequence(q: &FourierFunction, range: RangeInclusive<u32>, tol: f64) -> Result<WeightedSequence> {
    let table = spectral_table(q, range, tol)?;
    Ok(WeightedSequence::from_entries(
        table.records.iter().map(|r| (r.n as i64, Complex64::new(r.r_mid, 0.0))),
    ))
}

/// Ratio of the finite-difference derivative `∂_ε κ_n(ε q0)` at `ε = 0` to
/// `⟨q0, sin 2πnx⟩ / (2πn)`. Close to `±1`; its sign is the leading sign of
/// the κ expansion.
pub fn leading_sign_estimate(q0: &FourierFunction, n: u32, tol: f64) -> Result<f64> {
    if !q0.is_real_symmetric() {
        return Err(Error::invalid("the sign oracle uses a real direction"));
    }
    let expected = q0.sine_coefficient(n).re / (2.0 * PI * n as f64);
    if expected.abs() < 1e-12 {
        return Err(Error::invalid(format!("<q0, sin 2 pi {n} x> vanishes")));
    }
    let eps = 1e-5;
    let kappa_at = |e: f64| -> Result<f64> {
        let q = q0.scale(Complex64::new(e, 0.0));
        let win = Window::new(&q, n, tol)?;
        let (_, m) = solve_real(&q, n, tol, &win)?;
        Ok(floquet_from_y1(n, m.y1, true)?.kappa.re)
    };
    let derivative = (kappa_at(eps)? - kappa_at(-eps)?) / (2.0 * eps);
    Ok(derivative / expected)
}
