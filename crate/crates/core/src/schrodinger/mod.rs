//! Dirichlet and periodic spectra of `L(q) = -d²/dx² + q`, Floquet
//! exponents at the Dirichlet eigenvalues and the residual sequences that
//! measure how fast they approach their first-order asymptotics.
//!
//! Conventions: `μ_n` are the Dirichlet eigenvalues on `[0, 1]`, `λ_n^±` the
//! periodic eigenvalues on `[0, 2]` (roots of `Δ(λ) = ±2` with
//! `Δ = y1(1, λ) + y2'(1, λ)`) and `κ_n = -log((-1)^n y1(1, μ_n))` on the
//! principal branch.

mod continuation;
mod dirichlet;
mod periodic;
mod residual;

pub use continuation::{analytic_continuation_check, ContinuationEntry, ContinuationReport, CIRCLE_POINTS};
pub use dirichlet::{continue_dirichlet, dirichlet_eigenvalue, dirichlet_spectrum, DirichletEigenvalue};
pub use periodic::{periodic_spectrum, EdgeMethod, PeriodicPair, PeriodicSpectrum};
pub use residual::{
    kappa_residual_sequence, leading_sign_estimate, midpoint_residual_sequence, spectral_table, SpectralRecord,
    SpectralTable, KAPPA_LEADING_SIGN,
};

pub use crate::propagator::fundamental_solution;

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::propagator::{check_tol, Propagator};
use crate::{Error, FourierFunction, Result};

/// Half-width of the search window `[n²π² - π/2, n²π² + π/2]`.
pub const WINDOW_HALF_WIDTH: f64 = PI / 2.0;

/// `μ_n` counts as localized when `|μ_n - n²π²| < π/4`.
pub const LOCALIZATION_RADIUS: f64 = PI / 4.0;

/// Floquet exponent `κ_n` at `μ_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetExponent {
    pub n: u32,
    pub kappa: Complex64,
    /// `|(-1)^n y1(1, μ_n) - 1| ≤ 1/2`, where the principal logarithm is
    /// analytic in the potential.
    pub valid: bool,
    /// `|(-1)^n y1(1, μ_n) - 1|`.
    pub distance: f64,
}

/// `Δ(λ) = y1(1, λ) + y2'(1, λ)`.
pub fn discriminant(q: &FourierFunction, lambda: Complex64, tol: f64) -> Result<Complex64> {
    Ok(fundamental_solution(q, lambda, tol)?.discriminant())
}

/// `κ_n` from a freshly integrated `y1(1, μ_n)`.
pub fn floquet_exponent(q: &FourierFunction, mu: &DirichletEigenvalue, tol: f64) -> Result<FloquetExponent> {
    let m = fundamental_solution(q, mu.mu, tol)?;
    floquet_from_y1(mu.n, m.y1, q.is_real_symmetric())
}

pub(crate) fn floquet_from_y1(n: u32, y1: Complex64, real: bool) -> Result<FloquetExponent> {
    let w = if n.is_multiple_of(2) { y1 } else { -y1 };
    if real && !(w.re > 0.0) {
        return Err(Error::Inconsistency(alloc::format!(
            "(-1)^n y1(1, mu_n) = {} is not positive for a real potential (n = {n})",
            w.re
        )));
    }
    let mut kappa = -w.ln();
    if real {
        kappa.im = 0.0;
    }
    let distance = (w - 1.0).norm();
    Ok(FloquetExponent {
        n,
        kappa,
        valid: distance <= 0.5,
        distance,
    })
}

pub(crate) fn free_eigenvalue(n: u32) -> f64 {
    let v = n as f64 * PI;
    v * v
}

/// One calibrated mesh serving every evaluation near `n²π²`.
pub(crate) struct Window {
    pub lo: f64,
    pub hi: f64,
    pub prop: Propagator,
    pub est: f64,
}

impl Window {
    pub fn new(q: &FourierFunction, n: u32, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if n == 0 {
            return Err(Error::invalid("eigenvalue index starts at 1"));
        }
        let c = free_eigenvalue(n);
        let lo = c - WINDOW_HALF_WIDTH;
        let hi = c + WINDOW_HALF_WIDTH;
        let probes = [lo, c, hi].map(|x| Complex64::new(x, 0.0));
        let (prop, est) = Propagator::calibrated(q, &probes, tol)?;
        Ok(Window { lo, hi, prop, est })
    }
}

/// Stopping width for real root polishing near `x`.
pub(crate) fn root_xtol(x: f64) -> f64 {
    4.0 * f64::EPSILON * x.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floquet_sign_conventions() {
        let k = floquet_from_y1(2, Complex64::new(1.0, 0.0), true).unwrap();
        assert_eq!(k.kappa, Complex64::new(0.0, 0.0));
        assert!(k.valid);
        let k = floquet_from_y1(1, Complex64::new(-2.0, 0.0), true).unwrap();
        assert!((k.kappa.re + 2f64.ln()).abs() < 1e-15);
        assert!(!k.valid);
        assert!(matches!(
            floquet_from_y1(1, Complex64::new(0.5, 0.0), true),
            Err(Error::Inconsistency(_))
        ));
        // complex potentials only flag, they do not fail
        assert!(floquet_from_y1(1, Complex64::new(0.5, 0.1), false).is_ok());
    }
}
