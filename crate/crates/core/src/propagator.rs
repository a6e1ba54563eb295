//! Fundamental matrix of `-y'' + q y = λ y` on `[0, 1]`.
//!
//! The first-order system `Y' = [[0, 1], [q - λ, 0]] Y`, `Y(0) = I`, is
//! integrated with `STAGES`-point Gauss–Legendre collocation (order
//! `2·STAGES`) on a uniform mesh. For a linear system the collocation
//! equations reduce to one `STAGES × STAGES` solve per step, and the same
//! factorization serves the variational columns `∂^k Y / ∂λ^k`.
//!
//! Collocation is symplectic, so `det M = 1` is kept to rounding error, and
//! on a fixed mesh the computed `M(1, λ)` is an entire function of `λ`. The
//! root finders rely on the latter: they calibrate one mesh per bracket and
//! never see step-size jumps.

// the collocation kernels index several arrays by the same stage number
#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::{Error, FourierFunction, Result};

pub const STAGES: usize = 6;

/// Upper bound on mesh size before an integration is declared failed.
pub const MAX_STEPS: usize = 1 << 17;

/// Accepted range for the integrator tolerance.
pub const TOL_RANGE: (f64, f64) = (1e-13, 1e-6);

const ORDER_FACTOR: f64 = ((1u64 << (2 * STAGES)) - 1) as f64;

type Row = [Complex64; STAGES];

/// The four entries of a 2×2 solution matrix at `x = 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Mat2 {
    pub y1: Complex64,
    pub y2: Complex64,
    pub dy1: Complex64,
    pub dy2: Complex64,
}

impl Mat2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Mat2 {
            y1: one,
            dy2: one,
            ..Default::default()
        }
    }

    pub fn det(&self) -> Complex64 {
        self.y1 * self.dy2 - self.y2 * self.dy1
    }

    /// `y1 + y2'`, the Floquet discriminant.
    pub fn trace(&self) -> Complex64 {
        self.y1 + self.dy2
    }

    /// Entries rescaled to comparable size: `(y1, ν y2, y1'/ν, y2')`.
    fn scaled(&self, nu: f64) -> [Complex64; 4] {
        [self.y1, self.y2 * nu, self.dy1 / nu, self.dy2]
    }

    fn scaled_gap(&self, other: &Mat2, nu: f64) -> f64 {
        let a = self.scaled(nu);
        let b = other.scaled(nu);
        (0..4).map(|i| (a[i] - b[i]).norm()).fold(0.0, f64::max)
    }

    fn scaled_size(&self, nu: f64) -> f64 {
        self.scaled(nu).iter().map(|v| v.norm()).fold(1.0, f64::max)
    }
}

/// `M(1, λ)` with an error estimate from comparing two meshes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalMatrix {
    pub lambda: Complex64,
    pub y1: Complex64,
    pub y2: Complex64,
    pub dy1: Complex64,
    pub dy2: Complex64,
    /// Step-halving estimate on the scaled entries `(y1, ν y2, y1'/ν, y2')`.
    pub est_error: f64,
    pub steps: usize,
}

impl FundamentalMatrix {
    pub fn matrix(&self) -> Mat2 {
        Mat2 {
            y1: self.y1,
            y2: self.y2,
            dy1: self.dy1,
            dy2: self.dy2,
        }
    }

    pub fn wronskian(&self) -> Complex64 {
        self.matrix().det()
    }

    pub fn discriminant(&self) -> Complex64 {
        self.matrix().trace()
    }
}

#[derive(Debug, Clone)]
struct GaussRule {
    c: [f64; STAGES],
    b: [f64; STAGES],
    a: [[f64; STAGES]; STAGES],
    a2: [[f64; STAGES]; STAGES],
}

impl GaussRule {
    fn new() -> Self {
        let (x, w) = legendre_nodes();
        let mut c = [0.0; STAGES];
        let mut b = [0.0; STAGES];
        for i in 0..STAGES {
            c[i] = 0.5 * (1.0 + x[i]);
            b[i] = 0.5 * w[i];
        }
        let lagrange = |l: usize, t: f64| {
            (0..STAGES)
                .filter(|&m| m != l)
                .map(|m| (t - c[m]) / (c[l] - c[m]))
                .product::<f64>()
        };
        let mut a = [[0.0; STAGES]; STAGES];
        for i in 0..STAGES {
            for l in 0..STAGES {
                a[i][l] = (0..STAGES).map(|m| c[i] * b[m] * lagrange(l, c[i] * c[m])).sum();
            }
        }
        let mut a2 = [[0.0; STAGES]; STAGES];
        for i in 0..STAGES {
            for l in 0..STAGES {
                a2[i][l] = (0..STAGES).map(|m| a[i][m] * a[m][l]).sum();
            }
        }
        GaussRule { c, b, a, a2 }
    }
}

/// Roots and weights of the Legendre polynomial of degree `STAGES` on
/// `[-1, 1]`, in increasing order.
fn legendre_nodes() -> ([f64; STAGES], [f64; STAGES]) {
    let n = STAGES;
    let mut x = [0.0; STAGES];
    let mut w = [0.0; STAGES];
    for i in 0..n {
        let mut r = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, r);
            dp = d;
            let step = p / d;
            r -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, r);
        if d != 0.0 {
            dp = d;
        }
        x[i] = r;
        w[i] = 2.0 / ((1.0 - r * r) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre propagator for one potential on one uniform mesh.
///
/// The potential is tabulated at every collocation node when the propagator
/// is built, so repeated evaluations at different `λ` only pay for the
/// linear algebra.
#[derive(Debug, Clone)]
pub struct Propagator {
    steps: usize,
    rule: GaussRule,
    table: Vec<Row>,
    real: bool,
}

impl Propagator {
    pub fn new(q: &FourierFunction, steps: usize) -> Result<Self> {
        if steps == 0 || steps > MAX_STEPS {
            return Err(Error::invalid(alloc::format!("mesh size {steps} out of range")));
        }
        let rule = GaussRule::new();
        let h = 1.0 / steps as f64;
        let mut table = vec![[Complex64::default(); STAGES]; steps];
        if !q.is_zero() {
            for (j, row) in table.iter_mut().enumerate() {
                for (i, slot) in row.iter_mut().enumerate() {
                    *slot = q.value_at((j as f64 + rule.c[i]) * h);
                }
            }
        }
        Ok(Propagator {
            steps,
            rule,
            table,
            real: q.is_real_symmetric(),
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Whether the tabulated potential is real.
    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Propagator for `(1 - t)·q_self + t·q_other` on the same mesh.
    pub fn blend(&self, other: &Propagator, t: Complex64) -> Result<Propagator> {
        if self.steps != other.steps {
            return Err(Error::invalid("blend needs propagators on the same mesh"));
        }
        let s = Complex64::new(1.0, 0.0) - t;
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| {
                let mut row = [Complex64::default(); STAGES];
                for i in 0..STAGES {
                    row[i] = a[i] * s + b[i] * t;
                }
                row
            })
            .collect();
        Ok(Propagator {
            steps: self.steps,
            rule: self.rule.clone(),
            table,
            real: self.real && other.real && t.im == 0.0,
        })
    }

    pub fn monodromy(&self, lambda: Complex64) -> Mat2 {
        self.run::<1>(lambda, false).0[0]
    }

    /// `[M, ∂_λ M, …]` at `x = 1`; `D` is the number of matrices returned
    /// (at most 4).
    pub fn derivatives<const D: usize>(&self, lambda: Complex64) -> [Mat2; D] {
        self.run::<D>(lambda, false).0
    }

    /// `M(1, λ)` and `∂_λ M(1, λ)` at a real `λ`, plus the number of sign
    /// changes of `y2(x, λ)` sampled at the interior mesh nodes and
    /// collocation points. For a real potential that count equals the
    /// number of Dirichlet eigenvalues below `λ` once the mesh resolves the
    /// oscillation.
    pub fn shoot(&self, lambda: f64) -> ([Mat2; 2], usize) {
        let (m, zeros) = self.run::<2>(Complex64::new(lambda, 0.0), true);
        (m, zeros)
    }

    fn run<const D: usize>(&self, lambda: Complex64, count_zeros: bool) -> ([Mat2; D], usize) {
        assert!((1..=4).contains(&D), "derivative order out of range");
        let rule = &self.rule;
        let h = 1.0 / self.steps as f64;
        let h2 = h * h;
        // state[k][col] = (y, y') of the k-th λ-derivative of column `col`
        let mut state = [[(Complex64::default(), Complex64::default()); 2]; D];
        state[0][0].0 = Complex64::new(1.0, 0.0);
        state[0][1].1 = Complex64::new(1.0, 0.0);
        let mut zeros = ZeroCounter::default();

        for (step, row) in self.table.iter().enumerate() {
            let mut w = [Complex64::default(); STAGES];
            for i in 0..STAGES {
                w[i] = row[i] - lambda;
            }
            let mut lu = [[Complex64::default(); STAGES]; STAGES];
            for i in 0..STAGES {
                for l in 0..STAGES {
                    lu[i][l] = -w[l] * (h2 * rule.a2[i][l]);
                }
                lu[i][i] += 1.0;
            }
            let perm = lu_factor(&mut lu);

            for col in 0..2 {
                let mut prev_u = [Complex64::default(); STAGES];
                for k in 0..D {
                    let (y, dy) = state[k][col];
                    let kf = k as f64;
                    let mut rhs = [Complex64::default(); STAGES];
                    for i in 0..STAGES {
                        let mut r = y + dy * (h * rule.c[i]);
                        if k > 0 {
                            let mut acc = Complex64::default();
                            for l in 0..STAGES {
                                acc += prev_u[l] * rule.a2[i][l];
                            }
                            r -= acc * (kf * h2);
                        }
                        rhs[i] = r;
                    }
                    let u = lu_solve(&lu, &perm, rhs);
                    if count_zeros && col == 1 && k == 0 {
                        for v in &u {
                            zeros.push(v.re);
                        }
                    }
                    // g_l = stage derivative of the second component
                    let mut g = [Complex64::default(); STAGES];
                    for l in 0..STAGES {
                        g[l] = w[l] * u[l] - prev_u[l] * kf;
                    }
                    let mut new_y = y;
                    let mut new_dy = dy;
                    for i in 0..STAGES {
                        let mut v = dy;
                        for l in 0..STAGES {
                            v += g[l] * (h * rule.a[i][l]);
                        }
                        new_y += v * (h * rule.b[i]);
                        new_dy += g[i] * (h * rule.b[i]);
                    }
                    state[k][col] = (new_y, new_dy);
                    prev_u = u;
                }
            }

            if count_zeros && step + 1 < self.steps {
                zeros.push(state[0][1].0.re);
            }
        }

        let mut out = [Mat2::default(); D];
        for k in 0..D {
            out[k] = Mat2 {
                y1: state[k][0].0,
                dy1: state[k][0].1,
                y2: state[k][1].0,
                dy2: state[k][1].1,
            };
        }
        (out, zeros.count)
    }

    /// Picks the coarsest mesh, doubling from a heuristic start, on which
    /// the step-halving estimate at every probe is within `tol` (relative to
    /// the scaled entry size). Returns the finer of the two compared meshes
    /// and the largest estimate seen at the probes.
    pub fn calibrated(q: &FourierFunction, probes: &[Complex64], tol: f64) -> Result<(Propagator, f64)> {
        let lam_max = probes.iter().map(|l| l.norm()).fold(0.0, f64::max);
        let step_limit = || {
            let worst = probes
                .iter()
                .copied()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap_or_default();
            Error::StepLimit {
                max_steps: MAX_STEPS,
                lambda_re: worst.re,
                lambda_im: worst.im,
            }
        };
        let mut steps = initial_steps(q, lam_max);
        if 2 * steps > MAX_STEPS {
            return Err(step_limit());
        }
        let coarse = Propagator::new(q, steps)?;
        let mut coarse_vals: Vec<Mat2> = probes.iter().map(|&l| coarse.monodromy(l)).collect();
        loop {
            if 2 * steps > MAX_STEPS {
                return Err(step_limit());
            }
            let fine = Propagator::new(q, 2 * steps)?;
            let fine_vals: Vec<Mat2> = probes.iter().map(|&l| fine.monodromy(l)).collect();
            let mut ok = true;
            let mut worst = 0.0f64;
            for ((&l, a), b) in probes.iter().zip(&coarse_vals).zip(&fine_vals) {
                let nu = nu_scale(l);
                let est = a.scaled_gap(b, nu) / ORDER_FACTOR;
                worst = worst.max(est);
                if !(est <= tol * b.scaled_size(nu)) {
                    ok = false;
                }
            }
            if ok {
                return Ok((fine, worst));
            }
            steps *= 2;
            coarse_vals = fine_vals;
        }
    }
}

#[derive(Default)]
struct ZeroCounter {
    last: f64,
    count: usize,
}

impl ZeroCounter {
    fn push(&mut self, v: f64) {
        if v != 0.0 {
            if self.last != 0.0 && v.signum() != self.last {
                self.count += 1;
            }
            self.last = v.signum();
        }
    }
}

/// `max(1, |√λ|)`, the natural scale between `y` and `y'`.
pub(crate) fn nu_scale(lambda: Complex64) -> f64 {
    lambda.sqrt().norm().max(1.0)
}

fn initial_steps(q: &FourierFunction, lam_max: f64) -> usize {
    let freq = lam_max.sqrt() + 2.0 * PI * q.max_freq() as f64 * (!q.is_zero()) as u8 as f64 + q.abs_sum().sqrt();
    ((freq / 3.0).ceil() as usize).max(4)
}

pub fn check_tol(tol: f64) -> Result<()> {
    if tol >= TOL_RANGE.0 && tol <= TOL_RANGE.1 {
        Ok(())
    } else {
        Err(Error::invalid(alloc::format!(
            "tolerance {tol} outside [{}, {}]",
            TOL_RANGE.0,
            TOL_RANGE.1
        )))
    }
}

/// `M(1, λ)` for `L(q) M = λ M`, `M(0) = I`, to tolerance `tol`.
pub fn fundamental_solution(q: &FourierFunction, lambda: Complex64, tol: f64) -> Result<FundamentalMatrix> {
    check_tol(tol)?;
    let (prop, est) = Propagator::calibrated(q, &[lambda], tol)?;
    let m = prop.monodromy(lambda);
    Ok(FundamentalMatrix {
        lambda,
        y1: m.y1,
        y2: m.y2,
        dy1: m.dy1,
        dy2: m.dy2,
        est_error: est,
        steps: prop.steps(),
    })
}

fn lu_factor(m: &mut [[Complex64; STAGES]; STAGES]) -> [usize; STAGES] {
    let mut perm = [0usize; STAGES];
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    for col in 0..STAGES {
        let mut piv = col;
        let mut best = m[col][col].norm_sqr();
        for r in col + 1..STAGES {
            let v = m[r][col].norm_sqr();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if piv != col {
            m.swap(piv, col);
            perm.swap(piv, col);
        }
        let inv = Complex64::new(1.0, 0.0) / m[col][col];
        for r in col + 1..STAGES {
            let f = m[r][col] * inv;
            m[r][col] = f;
            for c in col + 1..STAGES {
                let t = m[col][c];
                m[r][c] -= f * t;
            }
        }
    }
    perm
}

fn lu_solve(lu: &[[Complex64; STAGES]; STAGES], perm: &[usize; STAGES], rhs: Row) -> Row {
    let mut x = [Complex64::default(); STAGES];
    for i in 0..STAGES {
        let mut v = rhs[perm[i]];
        for j in 0..i {
            v -= lu[i][j] * x[j];
        }
        x[i] = v;
    }
    for i in (0..STAGES).rev() {
        let mut v = x[i];
        for j in i + 1..STAGES {
            v -= lu[i][j] * x[j];
        }
        x[i] = v / lu[i][i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{sample_ball, SobolevIndex};
    use approx::assert_relative_eq;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gauss_rule_is_consistent() {
        let r = GaussRule::new();
        assert_relative_eq!(r.b.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        for i in 0..STAGES {
            // row sums of A are the nodes
            assert_relative_eq!(r.a[i].iter().sum::<f64>(), r.c[i], epsilon = 1e-14);
            // A integrates t exactly
            let lin: f64 = (0..STAGES).map(|l| r.a[i][l] * r.c[l]).sum();
            assert_relative_eq!(lin, 0.5 * r.c[i] * r.c[i], epsilon = 1e-14);
        }
        // b integrates t^{2s-1}
        let k = 2 * STAGES - 1;
        let m: f64 = (0..STAGES).map(|i| r.b[i] * r.c[i].powi(k as i32)).sum();
        assert_relative_eq!(m, 1.0 / (k as f64 + 1.0), epsilon = 1e-14);
    }

    #[test]
    fn free_closed_forms() {
        let zero = FourierFunction::zero(0);
        let m = fundamental_solution(&zero, real(PI * PI), 1e-12).unwrap();
        assert!((m.y1 - real(-1.0)).norm() < 1e-12);
        assert!(m.y2.norm() < 1e-12);
        assert!((m.dy2 - real(-1.0)).norm() < 1e-12);
        let m = fundamental_solution(&zero, real(0.0), 1e-12).unwrap();
        assert!((m.y1 - real(1.0)).norm() < 1e-14);
        assert!((m.y2 - real(1.0)).norm() < 1e-14);
        assert!(m.dy1.norm() < 1e-14);
        assert!((m.dy2 - real(1.0)).norm() < 1e-14);
    }

    #[test]
    fn derivative_columns_match_finite_differences() {
        let q = sample_ball(SobolevIndex::new(1.0).unwrap(), 2.0, 5, 0.1, 4).unwrap();
        let p = Propagator::new(&q, 64).unwrap();
        let lam = Complex64::new(60.0, 3.0);
        let [m, d1, d2, d3] = p.derivatives::<4>(lam);
        let e = 1e-3;
        let mp = p.derivatives::<3>(lam + e);
        let mm = p.derivatives::<3>(lam - e);
        let fd = |a: Complex64, b: Complex64| (a - b) / (2.0 * e);
        assert!((fd(mp[0].y1, mm[0].y1) - d1.y1).norm() < 1e-7);
        assert!((fd(mp[0].dy2, mm[0].dy2) - d1.dy2).norm() < 1e-7);
        assert!((fd(mp[1].y2, mm[1].y2) - d2.y2).norm() < 1e-8);
        assert!((fd(mp[2].dy1, mm[2].dy1) - d3.dy1).norm() < 1e-8);
        assert_eq!(m, p.monodromy(lam));
    }

    #[test]
    fn blend_is_linear_in_potential() {
        let q = sample_ball(SobolevIndex::ZERO, 1.0, 4, 0.1, 1).unwrap();
        let zero = FourierFunction::zero(4);
        let p0 = Propagator::new(&zero, 40).unwrap();
        let p1 = Propagator::new(&q, 40).unwrap();
        let half = Propagator::new(&q.scale(real(0.5)), 40).unwrap();
        let b = p0.blend(&p1, real(0.5)).unwrap();
        let l = real(30.0);
        assert!((b.monodromy(l).y1 - half.monodromy(l).y1).norm() < 1e-14);
        assert!(p0.blend(&Propagator::new(&q, 20).unwrap(), real(0.5)).is_err());
    }

    #[test]
    fn tolerance_bounds() {
        let zero = FourierFunction::zero(0);
        assert!(fundamental_solution(&zero, real(1.0), 1e-14).is_err());
        assert!(fundamental_solution(&zero, real(1.0), 1e-5).is_err());
    }
}
