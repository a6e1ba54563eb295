//! Scalar root finding used by the spectral solvers.

use num_complex::Complex64;

use crate::Result;

/// Outcome of a bracketed search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub dfx: f64,
    pub iterations: usize,
}

/// Safeguarded Newton on `[lo, hi]`, where `f(lo)` and `f(hi)` differ in
/// sign. `f` returns the value and derivative. Newton steps leaving the
/// current bracket, or not halving it fast enough, fall back to bisection.
/// Returns `None` if the endpoints do not bracket a root.
pub fn rtsafe<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<Option<Root>>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (flo, dlo) = f(lo)?;
    if flo == 0.0 {
        return Ok(Some(Root { x: lo, fx: 0.0, dfx: dlo, iterations: 0 }));
    }
    let (fhi, dhi) = f(hi)?;
    if fhi == 0.0 {
        return Ok(Some(Root { x: hi, fx: 0.0, dfx: dhi, iterations: 0 }));
    }
    if flo.signum() == fhi.signum() {
        return Ok(None);
    }
    // keep f(a) < 0 < f(b)
    let (mut a, mut b) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x)?;
    for it in 1..=max_iter {
        let newton_ok = dfx != 0.0 && {
            let t = x - fx / dfx;
            (t - a) * (t - b) < 0.0
        };
        if !newton_ok || (2.0 * fx).abs() > (dx_old * dfx).abs() {
            dx_old = dx;
            dx = 0.5 * (b - a);
            x = a + dx;
        } else {
            dx_old = dx;
            dx = fx / dfx;
            x -= dx;
        }
        let (v, d) = f(x)?;
        fx = v;
        dfx = d;
        if fx == 0.0 || dx.abs() < xtol {
            return Ok(Some(Root { x, fx, dfx, iterations: it }));
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        if (b - a).abs() < xtol {
            return Ok(Some(Root { x, fx, dfx, iterations: it }));
        }
    }
    Ok(Some(Root { x, fx, dfx, iterations: max_iter }))
}

/// Plain complex Newton from `x0`. Stops when the step is below
/// `xtol · max(1, |x|)`; gives up (returns `None`) after `max_iter`
/// iterations or on a zero derivative.
pub fn newton_complex<F>(mut f: F, x0: Complex64, xtol: f64, max_iter: usize) -> Result<Option<(Complex64, Complex64)>>
where
    F: FnMut(Complex64) -> Result<(Complex64, Complex64)>,
{
    let mut x = x0;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x)?;
        if dfx == Complex64::new(0.0, 0.0) || !dfx.is_finite() || !fx.is_finite() {
            return Ok(None);
        }
        let step = fx / dfx;
        x -= step;
        if step.norm() <= xtol * x.norm().max(1.0) {
            return Ok(Some((x, dfx)));
        }
    }
    Ok(None)
}
