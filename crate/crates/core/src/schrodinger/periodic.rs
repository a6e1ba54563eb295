use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::{free_eigenvalue, root_xtol, Window};
use crate::propagator::{check_tol, Propagator};
use crate::roots::rtsafe;
use crate::{Error, FourierFunction, Result};

/// Absolute floor for rounding noise in `Δ(λ)`. A gap whose top
/// `max (-1)^n Δ - 2` stays below the noise level is reported closed.
pub const DISCRIMINANT_NOISE: f64 = 1e-13;

/// How the edges of a gap were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeMethod {
    /// `(-1)^n Δ` touches `2`; `λ^- = λ^+` at the touching point.
    Closed,
    /// Bracketed roots of `(-1)^n Δ - 2`.
    Direct,
    /// Roots of the cubic Taylor model of `(-1)^n Δ - 2` around its maximum.
    /// Used for narrow gaps, where direct roots lose most of their digits to
    /// the flat crossing but the model keeps the midpoint exact to rounding.
    Taylor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicPair {
    pub n: u32,
    pub lam_minus: f64,
    pub lam_plus: f64,
    pub method: EdgeMethod,
    /// Estimated absolute error of each edge.
    pub edge_error: f64,
    /// Estimated absolute error of the midpoint, which for narrow or closed
    /// gaps is far smaller than the edge error.
    pub midpoint_error: f64,
}

impl PeriodicPair {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lam_minus + self.lam_plus)
    }

    pub fn gap(&self) -> f64 {
        self.lam_plus - self.lam_minus
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpectrum {
    pub lambda0: f64,
    pub pairs: Vec<PeriodicPair>,
}

/// `λ_0` and `λ_n^±` for `n ≤ n_max`, for a real potential.
pub fn periodic_spectrum(q: &FourierFunction, n_max: u32, tol: f64) -> Result<PeriodicSpectrum> {
    check_tol(tol)?;
    if !q.is_real_symmetric() {
        return Err(Error::invalid("the periodic spectrum is computed for real potentials only"));
    }
    let mut solver = PeriodicSolver::new(q, tol);
    let mut pairs = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let win = Window::new(q, n, tol)?;
        pairs.push(solver.pair(n, &win)?);
    }
    let first = match pairs.first() {
        Some(p) => p.lam_minus,
        None => solver.pair(1, &Window::new(q, 1, tol)?)?.lam_minus,
    };
    let lambda0 = solver.lambda0(first)?;
    check_order(lambda0, pairs.iter().map(|p| (p.n, p.lam_minus, p.lam_plus)))?;
    Ok(PeriodicSpectrum { lambda0, pairs })
}

/// Checks `λ_0 < λ_1^- ≤ λ_1^+ < λ_2^- ≤ …` over `(n, λ_n^-, λ_n^+)`.
pub(crate) fn check_order(lambda0: f64, pairs: impl ExactSizeIterator<Item = (u32, f64, f64)>) -> Result<()> {
    let total = 2 * pairs.len() + 1;
    let mut last = lambda0;
    for (n, minus, plus) in pairs {
        if !(last < minus && minus <= plus) {
            return Err(Error::CountMismatch {
                expected: total,
                found: 2 * (n as usize - 1) + 1,
                diagnostic: format!("ordering breaks at n = {n}: previous {last}, lam_minus {minus}, lam_plus {plus}"),
            });
        }
        last = plus;
    }
    Ok(())
}

/// `g_n(λ) = (-1)^n Δ(λ) - 2` and its λ-derivatives.
struct GapFn<'a> {
    prop: &'a Propagator,
    sigma: f64,
}

impl<'a> GapFn<'a> {
    fn new(prop: &'a Propagator, n: u32) -> Self {
        GapFn {
            prop,
            sigma: if n.is_multiple_of(2) { 1.0 } else { -1.0 },
        }
    }

    fn eval<const D: usize>(&self, l: f64) -> [f64; D] {
        let m = self.prop.derivatives::<D>(Complex64::new(l, 0.0));
        let mut out = [0.0; D];
        for k in 0..D {
            out[k] = self.sigma * m[k].trace().re;
        }
        out[0] -= 2.0;
        out
    }

    fn value_slope(&self, l: f64) -> Result<(f64, f64)> {
        let [g, g1] = self.eval::<2>(l);
        Ok((g, g1))
    }
}

/// Edges of gap `n` given its top `c` and points `left < c < right` that
/// lie in the neighbouring bands. `None` when the data contradict that
/// picture.
fn edges(g: &GapFn, n: u32, left: f64, c: f64, right: f64, est: f64) -> Result<Option<PeriodicPair>> {
    let [d, g1, g2, g3] = g.eval::<4>(c);
    let noise = DISCRIMINANT_NOISE + 4.0 * est;
    let f2 = 0.5 * g2;
    let f3 = g3 / 6.0;
    if !(f2 < 0.0) {
        return Ok(None);
    }
    if d <= noise {
        if d < -noise {
            return Ok(None);
        }
        return Ok(Some(PeriodicPair {
            n,
            lam_minus: c,
            lam_plus: c,
            method: EdgeMethod::Closed,
            edge_error: (noise / -f2).sqrt(),
            midpoint_error: f3.abs() * noise / (2.0 * f2 * f2) + root_xtol(c),
        }));
    }
    let half = (d / -f2).sqrt();
    let direct_error = noise / (2.0 * -f2 * half);
    let taylor_error = half * (half * f3 / f2).powi(2);
    if taylor_error < direct_error {
        if let Some((xm, xp)) = taylor_roots(d, g1, f2, f3, half) {
            return Ok(Some(PeriodicPair {
                n,
                lam_minus: c + xm,
                lam_plus: c + xp,
                method: EdgeMethod::Taylor,
                edge_error: taylor_error + direct_error,
                midpoint_error: taylor_error + root_xtol(c),
            }));
        }
    }
    let xtol = root_xtol(right);
    let lower = rtsafe(|l| g.value_slope(l), left, c, xtol, 200)?;
    let upper = rtsafe(|l| g.value_slope(l), c, right, xtol, 200)?;
    let (Some(lower), Some(upper)) = (lower, upper) else {
        return Ok(None);
    };
    let slope = lower.dfx.abs().min(upper.dfx.abs());
    Ok(Some(PeriodicPair {
        n,
        lam_minus: lower.x,
        lam_plus: upper.x,
        method: EdgeMethod::Direct,
        edge_error: noise / slope,
        midpoint_error: noise / slope,
    }))
}

/// Roots `x_- < 0 < x_+` of `d + g1 x + f2 x² + f3 x³` near `∓half`.
fn taylor_roots(d: f64, g1: f64, f2: f64, f3: f64, half: f64) -> Option<(f64, f64)> {
    let solve = |mut x: f64| {
        for _ in 0..50 {
            let v = d + x * (g1 + x * (f2 + x * f3));
            let dv = g1 + x * (2.0 * f2 + 3.0 * x * f3);
            if dv == 0.0 {
                return None;
            }
            let step = v / dv;
            x -= step;
            if step.abs() <= 1e-15 * x.abs() {
                return Some(x);
            }
        }
        None
    };
    let xm = solve(-half)?;
    let xp = solve(half)?;
    (xm < 0.0 && xp > 0.0 && xm > -2.0 * half && xp < 2.0 * half).then_some((xm, xp))
}

/// Shared state for one potential: the lazily built global scan used when
/// the per-window search fails.
pub(crate) struct PeriodicSolver<'q> {
    q: &'q FourierFunction,
    tol: f64,
    scan: Option<CriticalScan>,
}

impl<'q> PeriodicSolver<'q> {
    pub fn new(q: &'q FourierFunction, tol: f64) -> Self {
        PeriodicSolver { q, tol, scan: None }
    }

    /// Gap `n` from its window, or from the global scan.
    pub fn pair(&mut self, n: u32, win: &Window) -> Result<PeriodicPair> {
        if let Some(p) = window_pair(&win.prop, n, win.lo, win.hi, win.est)? {
            return Ok(p);
        }
        self.scan_pair(n)
    }

    fn scan(&mut self, count: usize) -> Result<&CriticalScan> {
        let stale = self.scan.as_ref().is_none_or(|s| s.crit.len() < count);
        if stale {
            self.scan = Some(CriticalScan::new(self.q, count, self.tol)?);
        }
        Ok(self.scan.as_ref().expect("scan was just built"))
    }

    fn scan_pair(&mut self, n: u32) -> Result<PeriodicPair> {
        let scan = self.scan(n as usize + 1)?;
        let i = n as usize - 1;
        let left = if i == 0 { scan.lambda_min } else { scan.crit[i - 1] };
        let g = GapFn::new(&scan.prop, n);
        edges(&g, n, left, scan.crit[i], scan.crit[i + 1], scan.est)?.ok_or_else(|| {
            Error::Inconsistency(format!(
                "gap {n}: discriminant does not reach (-1)^n 2 at its critical point {}",
                scan.crit[i]
            ))
        })
    }

    /// `λ_0`, the unique root of `Δ - 2` below `upper = λ_1^-`.
    pub fn lambda0(&mut self, upper: f64) -> Result<f64> {
        let lo = -(self.q.abs_sum() + 1.0);
        let probes = [lo, upper].map(|x| Complex64::new(x, 0.0));
        let (prop, _) = Propagator::calibrated(self.q, &probes, self.tol)?;
        let f = |l: f64| {
            let [m, d] = prop.derivatives::<2>(Complex64::new(l, 0.0));
            Ok((m.trace().re - 2.0, d.trace().re))
        };
        match rtsafe(f, lo, upper, root_xtol(upper), 200)? {
            Some(r) => Ok(r.x),
            None => Err(Error::BracketFailure {
                n: 0,
                diagnostic: format!("Δ - 2 keeps its sign on [{lo}, {upper}]"),
            }),
        }
    }
}

fn window_pair(prop: &Propagator, n: u32, lo: f64, hi: f64, est: f64) -> Result<Option<PeriodicPair>> {
    let g = GapFn::new(prop, n);
    let [g_lo, s_lo] = g.eval::<2>(lo);
    let [g_hi, s_hi] = g.eval::<2>(hi);
    if !(g_lo < 0.0 && g_hi < 0.0 && s_lo > 0.0 && s_hi < 0.0) {
        return Ok(None);
    }
    let top = rtsafe(
        |l| {
            let [_, g1, g2] = g.eval::<3>(l);
            Ok((g1, g2))
        },
        lo,
        hi,
        root_xtol(hi),
        200,
    )?;
    match top {
        Some(top) => edges(&g, n, lo, top.x, hi, est),
        None => Ok(None),
    }
}

/// Critical points of `Δ` in increasing order. For a real potential the
/// `n`-th one lies in the closure of gap `n`.
struct CriticalScan {
    prop: Propagator,
    est: f64,
    lambda_min: f64,
    crit: Vec<f64>,
}

impl CriticalScan {
    fn new(q: &FourierFunction, count: usize, tol: f64) -> Result<Self> {
        let spread = q.abs_sum() + 1.0;
        let lambda_min = -spread;
        let top = free_eigenvalue(count as u32 + 1) + 2.0 * spread;
        let probes = [lambda_min, 0.5 * (lambda_min + top), top].map(|x| Complex64::new(x, 0.0));
        let (prop, est) = Propagator::calibrated(q, &probes, tol)?;
        // uniform in √(λ - λ_min), sixteen samples per free band
        let du = PI / 16.0;
        let u_max = (top - lambda_min).sqrt();
        let slope = |l: f64| prop.derivatives::<2>(Complex64::new(l, 0.0))[1].trace().re;
        let mut crit = Vec::with_capacity(count);
        let mut prev_l = lambda_min;
        let mut prev_s = slope(prev_l);
        let mut u = du;
        while u <= u_max && crit.len() < count {
            let l = lambda_min + u * u;
            let s = slope(l);
            if s == 0.0 || s.signum() != prev_s.signum() {
                let f = |x: f64| {
                    let m = prop.derivatives::<3>(Complex64::new(x, 0.0));
                    Ok((m[1].trace().re, m[2].trace().re))
                };
                if let Some(r) = rtsafe(f, prev_l, l, root_xtol(l), 200)? {
                    crit.push(r.x);
                }
            }
            prev_l = l;
            prev_s = s;
            u += du;
        }
        if crit.len() < count {
            return Err(Error::CountMismatch {
                expected: count,
                found: crit.len(),
                diagnostic: format!("critical points of the discriminant below {top}"),
            });
        }
        Ok(CriticalScan {
            prop,
            est,
            lambda_min,
            crit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_spectrum_is_doubled() {
        let zero = FourierFunction::zero(0);
        let spec = periodic_spectrum(&zero, 6, 1e-12).unwrap();
        assert!(spec.lambda0.abs() < 1e-12);
        for p in &spec.pairs {
            let c = free_eigenvalue(p.n);
            assert_eq!(p.method, EdgeMethod::Closed);
            assert!((p.lam_minus - c).abs() <= 1e-12 * c);
        }
    }

    #[test]
    fn scan_matches_windows() {
        let q = FourierFunction::cosine(1, 1.2).unwrap();
        let spec = periodic_spectrum(&q, 3, 1e-12).unwrap();
        let mut solver = PeriodicSolver::new(&q, 1e-12);
        for p in &spec.pairs {
            let s = solver.scan_pair(p.n).unwrap();
            assert!((s.lam_minus - p.lam_minus).abs() < 1e-8, "{s:?} {p:?}");
            assert!((s.lam_plus - p.lam_plus).abs() < 1e-8, "{s:?} {p:?}");
        }
    }

    #[test]
    fn strong_potential_uses_scan() {
        let q = FourierFunction::cosine(1, 30.0).unwrap();
        let spec = periodic_spectrum(&q, 3, 1e-11).unwrap();
        assert!(spec.lambda0 < spec.pairs[0].lam_minus);
        assert!(spec.pairs[0].gap() > 1.0);
    }

    #[test]
    fn taylor_model_roots() {
        // exact quadratic: d - x² has roots ±√d
        let (a, b) = taylor_roots(1e-6, 0.0, -1.0, 0.0, 1e-3).unwrap();
        assert!((a + 1e-3).abs() < 1e-18 && (b - 1e-3).abs() < 1e-18);
    }
}
