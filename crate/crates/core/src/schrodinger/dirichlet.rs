use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{free_eigenvalue, root_xtol, Window, LOCALIZATION_RADIUS, WINDOW_HALF_WIDTH};
use crate::propagator::{check_tol, Mat2, Propagator, MAX_STEPS};
use crate::roots::{newton_complex, rtsafe};
use crate::{Error, FourierFunction, Result};

/// Homotopy steps used by [`continue_dirichlet`] before any halving.
pub const HOMOTOPY_STEPS: u32 = 8;

const MAX_HALVINGS: u32 = 12;

/// Largest accepted distance between predicted and corrected roots on one
/// homotopy step. Consecutive free eigenvalues are at least `3π²` apart.
const MAX_JUMP: f64 = PI * PI / 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletEigenvalue {
    pub n: u32,
    pub mu: Complex64,
    /// Principal square root of `mu`.
    pub nu: Complex64,
    /// `|μ_n - n²π²| < π/4`.
    pub localized: bool,
    /// `|y2(1, μ_n)|` at the returned root.
    pub residual: f64,
    /// `max(1, |∂_λ y2| · π)`, the scale the residual is measured against.
    pub scale: f64,
    pub est_error: f64,
}

impl DirichletEigenvalue {
    fn new(n: u32, mu: Complex64, m: &Mat2, dy2_dlambda: Complex64, est_error: f64) -> Self {
        DirichletEigenvalue {
            n,
            mu,
            nu: mu.sqrt(),
            localized: (mu - free_eigenvalue(n)).norm() < LOCALIZATION_RADIUS,
            residual: m.y2.norm(),
            scale: (dy2_dlambda.norm() * 2.0 * WINDOW_HALF_WIDTH).max(1.0),
            est_error,
        }
    }
}

/// The `n`-th Dirichlet eigenvalue on `[0, 1]`.
///
/// Real potentials are solved by a bracketed search on
/// `[n²π² - π/2, n²π² + π/2]` with a Sturm-count bisection fallback; the
/// index is verified by counting interior zeros of the eigenfunction.
/// Complex potentials are reached by continuation from `q = 0` along `t·q`.
pub fn dirichlet_eigenvalue(q: &FourierFunction, n: u32, tol: f64) -> Result<DirichletEigenvalue> {
    if q.is_real_symmetric() {
        let win = Window::new(q, n, tol)?;
        Ok(solve_real(q, n, tol, &win)?.0)
    } else {
        Ok(continue_dirichlet(&FourierFunction::zero(q.max_freq()), q, n, tol)?.0)
    }
}

/// `μ_1, …, μ_{n_max}` in index order.
pub fn dirichlet_spectrum(q: &FourierFunction, n_max: u32, tol: f64) -> Result<Vec<DirichletEigenvalue>> {
    check_tol(tol)?;
    let out = (1..=n_max)
        .map(|n| dirichlet_eigenvalue(q, n, tol))
        .collect::<Result<Vec<_>>>()?;
    if q.is_real_symmetric() {
        for w in out.windows(2) {
            if !(w[0].mu.re < w[1].mu.re) {
                return Err(Error::CountMismatch {
                    expected: w[1].n as usize,
                    found: w[0].n as usize,
                    diagnostic: format!("mu_{} = {} is not below mu_{} = {}", w[0].n, w[0].mu.re, w[1].n, w[1].mu.re),
                });
            }
        }
    }
    Ok(out)
}

/// Real-potential solve on a prepared window. Returns the eigenvalue and
/// `M(1, μ_n)`.
pub(crate) fn solve_real(q: &FourierFunction, n: u32, tol: f64, win: &Window) -> Result<(DirichletEigenvalue, Mat2)> {
    if let Some(found) = bracketed(&win.prop, n, win.lo, win.hi, win.est)? {
        return Ok(found);
    }
    sturm_fallback(q, n, tol)
}

fn y2_and_slope(prop: &Propagator, l: f64) -> (f64, f64) {
    let [m, d] = prop.derivatives::<2>(Complex64::new(l, 0.0));
    (m.y2.re, d.y2.re)
}

/// Polished root in `[lo, hi]` carrying the right index, if there is one.
fn bracketed(prop: &Propagator, n: u32, lo: f64, hi: f64, est: f64) -> Result<Option<(DirichletEigenvalue, Mat2)>> {
    let xtol = root_xtol(hi);
    let Some(root) = rtsafe(|l| Ok(y2_and_slope(prop, l)), lo, hi, xtol, 200)? else {
        return Ok(None);
    };
    let ([m, d], zeros) = prop.shoot(root.x);
    if zeros + 1 != n as usize {
        return Ok(None);
    }
    let mu = Complex64::new(root.x, 0.0);
    Ok(Some((DirichletEigenvalue::new(n, mu, &m, d.y2, est), m)))
}

/// Bisection on the Sturm count of `y2(·, λ)` until `[a, b]` contains only
/// `μ_n`, then the usual polish.
fn sturm_fallback(q: &FourierFunction, n: u32, tol: f64) -> Result<(DirichletEigenvalue, Mat2)> {
    let spread = q.abs_sum() + 1.0;
    let mut a = -spread;
    let mut b = free_eigenvalue(n) + spread;
    let probes = [a, 0.5 * (a + b), b].map(|x| Complex64::new(x, 0.0));
    let (prop, est) = Propagator::calibrated(q, &probes, tol)?;
    let count = |l: f64| prop.shoot(l).1;
    let (mut ca, mut cb) = (count(a), count(b));
    if ca != 0 || cb < n as usize {
        return Err(Error::BracketFailure {
            n,
            diagnostic: format!("Sturm counts {ca} at {a} and {cb} at {b}, mesh of {} steps", prop.steps()),
        });
    }
    let n = n as usize;
    while !(ca + 1 == n && cb == n) && b - a > root_xtol(b) {
        let mid = 0.5 * (a + b);
        let cm = count(mid);
        if cm >= n {
            b = mid;
            cb = cm;
        } else {
            a = mid;
            ca = cm;
        }
    }
    let n = n as u32;
    bracketed(&prop, n, a, b, est)?.ok_or_else(|| Error::BracketFailure {
        n,
        diagnostic: format!("no sign change of y2(1, .) on the Sturm bracket [{a}, {b}]"),
    })
}

/// `μ_n` of `target` by Newton continuation along
/// `q(t) = base + t·(target - base)` from the real eigenvalue of `base`.
/// Also returns `M(1, μ_n)` for `target`.
pub fn continue_dirichlet(
    base: &FourierFunction,
    target: &FourierFunction,
    n: u32,
    tol: f64,
) -> Result<(DirichletEigenvalue, Mat2)> {
    if !base.is_real_symmetric() {
        return Err(Error::invalid("continuation starts from a real potential"));
    }
    let win = Window::new(base, n, tol)?;
    let (start, _) = solve_real(base, n, tol, &win)?;
    let path = ContinuationPath::new(base, target, start.mu.re, tol, win.prop.steps())?;
    path.follow(start)
}

/// Base and target tabulated on a common mesh.
pub(crate) struct ContinuationPath {
    base: Propagator,
    target: Propagator,
    est: f64,
}

impl ContinuationPath {
    pub fn new(base: &FourierFunction, target: &FourierFunction, mu0: f64, tol: f64, min_steps: usize) -> Result<Self> {
        let r = WINDOW_HALF_WIDTH;
        let probes = [
            Complex64::new(mu0 - r, 0.0),
            Complex64::new(mu0 + r, 0.0),
            Complex64::new(mu0, r),
            Complex64::new(mu0, -r),
        ];
        let (pt, est) = Propagator::calibrated(target, &probes, tol)?;
        let steps = pt.steps().max(min_steps).min(MAX_STEPS);
        let base = Propagator::new(base, steps)?;
        let target = if steps == pt.steps() { pt } else { Propagator::new(target, steps)? };
        Ok(ContinuationPath { base, target, est })
    }

    pub fn follow(&self, start: DirichletEigenvalue) -> Result<(DirichletEigenvalue, Mat2)> {
        let n = start.n;
        let full = 1.0 / HOMOTOPY_STEPS as f64;
        let min_dt = full / (1u64 << MAX_HALVINGS) as f64;
        let mut t = 0.0;
        let mut dt = full;
        let mut mu = start.mu;
        let mut prev: Option<(f64, Complex64)> = None;
        while t < 1.0 {
            let t1 = (t + dt).min(1.0);
            let guess = match prev {
                Some((tp, mp)) => mu + (mu - mp) * ((t1 - t) / (t - tp)),
                None => mu,
            };
            let prop = self.base.blend(&self.target, Complex64::new(t1, 0.0))?;
            let solved = newton_complex(
                |l| {
                    let [m, d] = prop.derivatives::<2>(l);
                    Ok((m.y2, d.y2))
                },
                guess,
                1e-14,
                40,
            )?;
            match solved {
                Some((root, _)) if (root - guess).norm() <= MAX_JUMP => {
                    prev = Some((t, mu));
                    mu = root;
                    t = t1;
                    dt = (2.0 * dt).min(full);
                }
                _ => {
                    dt *= 0.5;
                    if dt < min_dt {
                        return Err(Error::ContinuationDiverged { n, t });
                    }
                }
            }
        }
        let [m, d] = self.target.derivatives::<2>(mu);
        Ok((DirichletEigenvalue::new(n, mu, &m, d.y2, self.est), m))
    }
}
