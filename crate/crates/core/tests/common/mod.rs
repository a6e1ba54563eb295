//! Reference solvers that share no code with the library's integrator or
//! root finders.
#![allow(dead_code)]

use std::f64::consts::PI;

use hillspec_core::fourier::{sample_ball, SobolevIndex};
use hillspec_core::{Complex64, FourierFunction};
use nalgebra::{DMatrix, SymmetricEigen};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Classical RK4 for `Y' = [[0, 1], [q - λ, 0]] Y`, `Y(0) = I`, on `steps`
/// uniform steps. Returns `(y1, y2, y1', y2')` at `x = 1`.
pub fn rk4(q: &FourierFunction, lambda: Complex64, steps: usize) -> [Complex64; 4] {
    let h = 1.0 / steps as f64;
    let mut y = [[r(1.0), r(0.0)], [r(0.0), r(1.0)]]; // columns (y, y')
    let rhs = |x: f64, s: [Complex64; 2]| [s[1], (q.value_at(x) - lambda) * s[0]];
    for j in 0..steps {
        let x = j as f64 * h;
        for col in y.iter_mut() {
            let k1 = rhs(x, *col);
            let k2 = rhs(x + h / 2.0, [col[0] + k1[0] * (h / 2.0), col[1] + k1[1] * (h / 2.0)]);
            let k3 = rhs(x + h / 2.0, [col[0] + k2[0] * (h / 2.0), col[1] + k2[1] * (h / 2.0)]);
            let k4 = rhs(x + h, [col[0] + k3[0] * h, col[1] + k3[1] * h]);
            for i in 0..2 {
                col[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
        }
    }
    [y[0][0], y[1][0], y[0][1], y[1][1]]
}

/// RK4 on `steps` and `2·steps`, Richardson-extrapolated.
pub fn rk4_richardson(q: &FourierFunction, lambda: Complex64, steps: usize) -> [Complex64; 4] {
    let a = rk4(q, lambda, steps);
    let b = rk4(q, lambda, 2 * steps);
    std::array::from_fn(|i| (b[i] * 16.0 - a[i]) / 15.0)
}

/// Real root of `f` on `[lo, hi]` by plain bisection.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "bisect: no sign change on [{lo}, {hi}]");
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sorted eigenvalues of the Hill operator on `[0, 2]` (periodic boundary
/// conditions) truncated to the basis `e^{iπmx}`, `|m| ≤ m_max`. The first
/// entries are `λ_0, λ_1^-, λ_1^+, …`.
pub fn hill_periodic(q: &FourierFunction, m_max: i64) -> Vec<f64> {
    let dim = (2 * m_max + 1) as usize;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, m) in (-m_max..=m_max).enumerate() {
        for (j, mp) in (-m_max..=m_max).enumerate() {
            let mut v = r(0.0);
            if i == j {
                v += (PI * m as f64).powi(2);
            }
            if (m - mp) % 2 == 0 {
                v += q.coeff((m - mp) / 2);
            }
            h[(i, j)] = v;
        }
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Sorted Dirichlet eigenvalues on `[0, 1]` for a potential even about
/// `x = 0`, in the basis `sin(mπx)`, `1 ≤ m ≤ m_max`.
pub fn dirichlet_even(q: &FourierFunction, m_max: i64) -> Vec<f64> {
    let dim = m_max as usize;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for m in 1..=m_max {
        for mp in 1..=m_max {
            let mut v = 0.0;
            if m == mp {
                v += (PI * m as f64).powi(2);
            }
            if (m - mp) % 2 == 0 {
                v += q.coeff((m - mp) / 2).re - q.coeff((m + mp) / 2).re;
            }
            h[((m - 1) as usize, (mp - 1) as usize)] = v;
        }
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Real cosine series with random coefficients, so `q(-x) = q(x)`.
pub fn even_potential(max_freq: u32, scale: f64, seed: u64) -> FourierFunction {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    FourierFunction::from_positive_modes(
        max_freq as usize,
        (1..=max_freq).map(|k| (k, r(scale * rng.gen_range(-1.0..1.0) / k as f64))),
    )
    .unwrap()
}

/// Sharp sample of `H^s` with `‖q‖_s = 0.95·radius`.
pub fn sample(s: f64, radius: f64, max_freq: usize, seed: u64) -> FourierFunction {
    sample_ball(SobolevIndex::new(s).unwrap(), radius, max_freq, 0.05, seed).unwrap()
}

pub fn free(n: u32) -> f64 {
    (n as f64 * PI).powi(2)
}
