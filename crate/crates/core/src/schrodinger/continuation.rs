use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use num_complex::Complex64;

use super::dirichlet::{solve_real, ContinuationPath};
use super::{floquet_from_y1, Window};
use crate::propagator::check_tol;
use crate::{Error, FourierFunction, Result};

/// Sample points on the circle `|w| = ρ`.
pub const CIRCLE_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationEntry {
    pub n: u32,
    /// `κ_n(q0)`.
    pub center: Complex64,
    /// `κ_n(q0 + w_j d)` at `w_j = ρ e^{2πij/8}`.
    pub samples: Vec<Complex64>,
    pub valid: Vec<bool>,
    pub mean: Complex64,
    /// `|mean - center|`; zero up to `O(ρ^8)` and rounding when `κ_n` is
    /// analytic on the disk.
    pub defect: f64,
}

impl ContinuationEntry {
    pub fn all_valid(&self) -> bool {
        self.valid.iter().all(|&v| v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationReport {
    pub rho: f64,
    pub entries: Vec<ContinuationEntry>,
    /// Smallest `n_R` such that every sample is valid for all `n > n_R` in
    /// the range.
    pub n_r: u32,
}

impl ContinuationReport {
    /// Largest defect over `n > n_R`.
    pub fn max_defect_above(&self, n_r: u32) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.n > n_r)
            .map(|e| e.defect)
            .fold(0.0, f64::max)
    }
}

/// Mean-value test of the analyticity of `w ↦ κ_n(q0 + w·direction)`.
///
/// Each circle sample is reached by Newton continuation of `μ_n` from the
/// real potential `q0` along the segment to `q0 + w·direction`.
pub fn analytic_continuation_check(
    q0: &FourierFunction,
    direction: &FourierFunction,
    rho: f64,
    range: RangeInclusive<u32>,
    tol: f64,
) -> Result<ContinuationReport> {
    check_tol(tol)?;
    if !q0.is_real_symmetric() {
        return Err(Error::invalid("the base potential must be real"));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("rho must be positive"));
    }
    let points: Vec<Complex64> = (0..CIRCLE_POINTS)
        .map(|j| Complex64::from_polar(rho, 2.0 * PI * j as f64 / CIRCLE_POINTS as f64))
        .collect();
    let targets: Vec<FourierFunction> = points.iter().map(|&w| q0.add_scaled(w, direction)).collect();
    let mut entries = Vec::new();
    for n in range.clone() {
        let win = Window::new(q0, n, tol)?;
        let (start, m0) = solve_real(q0, n, tol, &win)?;
        let center = floquet_from_y1(n, m0.y1, true)?.kappa;
        let mut samples = Vec::with_capacity(CIRCLE_POINTS);
        let mut valid = Vec::with_capacity(CIRCLE_POINTS);
        for target in &targets {
            let path = ContinuationPath::new(q0, target, start.mu.re, tol, win.prop.steps())?;
            let (_, m) = path.follow(start)?;
            let fl = floquet_from_y1(n, m.y1, false)?;
            samples.push(fl.kappa);
            valid.push(fl.valid);
        }
        let mean = samples.iter().sum::<Complex64>() / CIRCLE_POINTS as f64;
        entries.push(ContinuationEntry {
            n,
            center,
            defect: (mean - center).norm(),
            samples,
            valid,
            mean,
        });
    }
    let mut n_r = range.start().saturating_sub(1);
    for e in &entries {
        if !e.all_valid() {
            n_r = e.n;
        }
    }
    Ok(ContinuationReport { rho, entries, n_r })
}
