//! Mean-zero functions on the circle `𝕋 = ℝ/ℤ` with finitely many Fourier
//! modes.
//!
//! A [`FourierFunction`] stores `ĉ(k)` for `0 < |k| ≤ K`; the zero mode is
//! always absent. Real-valued functions carry the `real_symmetric` flag,
//! which asserts `ĉ(-k) = conj(ĉ(k))` exactly.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{bracket, bracket_pow, Error, Result};

/// Extra decay added by [`sample_ball`] so that a sample is in `H^s` but not
/// in any `H^{s+ε}` with `ε ≥ 0.01`.
pub const SAMPLE_DECAY_EXCESS: f64 = 0.01;

/// Sobolev order `s ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub const ZERO: SobolevIndex = SobolevIndex(0.0);

    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s >= 0.0 {
            Ok(SobolevIndex(s))
        } else {
            Err(Error::invalid(alloc::format!(
                "Sobolev order must be finite and >= 0, got {s}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierFunction {
    coeffs: BTreeMap<i64, Complex64>,
    max_freq: usize,
    real_symmetric: bool,
}

impl FourierFunction {
    pub fn zero(max_freq: usize) -> Self {
        FourierFunction {
            coeffs: BTreeMap::new(),
            max_freq,
            real_symmetric: true,
        }
    }

    /// Builds a function from explicit `(k, ĉ(k))` pairs.
    ///
    /// Exact zeros are dropped. A nonzero `k = 0` entry, an entry with
    /// `|k| > max_freq`, a repeated `k`, a non-finite value, or a broken
    /// conjugate symmetry when `real_symmetric` is set are all rejected.
    pub fn new(
        max_freq: usize,
        real_symmetric: bool,
        coeffs: impl IntoIterator<Item = (i64, Complex64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::invalid(alloc::format!("non-finite coefficient at k = {k}")));
            }
            if k.unsigned_abs() as usize > max_freq {
                return Err(Error::invalid(alloc::format!(
                    "frequency {k} exceeds max_freq {max_freq}"
                )));
            }
            if map.contains_key(&k) {
                return Err(Error::invalid(alloc::format!("frequency {k} given twice")));
            }
            if c == Complex64::new(0.0, 0.0) {
                // keep the key so duplicates are still caught, removed below
                map.insert(k, c);
                continue;
            }
            if k == 0 {
                return Err(Error::invalid("mean-zero functions cannot carry a k = 0 mode"));
            }
            map.insert(k, c);
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        if real_symmetric {
            for (&k, &c) in &map {
                let mirror = map.get(&-k).copied().unwrap_or_default();
                if mirror != c.conj() {
                    return Err(Error::invalid(alloc::format!(
                        "coefficients at ±{} are not conjugate",
                        k.abs()
                    )));
                }
            }
        }
        Ok(FourierFunction {
            coeffs: map,
            max_freq,
            real_symmetric,
        })
    }

    /// Real function with `ĉ(k) = modes[k]` for `k > 0` and the mirrored
    /// conjugates for `k < 0`.
    pub fn from_positive_modes(
        max_freq: usize,
        modes: impl IntoIterator<Item = (u32, Complex64)>,
    ) -> Result<Self> {
        let mut pairs = Vec::new();
        for (k, c) in modes {
            if k == 0 {
                return Err(Error::invalid("positive modes start at k = 1"));
            }
            pairs.push((k as i64, c));
            pairs.push((-(k as i64), c.conj()));
        }
        Self::new(max_freq, true, pairs)
    }

    /// `amplitude · cos(2πnx)`.
    pub fn cosine(n: u32, amplitude: f64) -> Result<Self> {
        Self::from_positive_modes(n as usize, [(n, Complex64::new(amplitude / 2.0, 0.0))])
    }

    /// `amplitude · sin(2πnx)`.
    pub fn sine(n: u32, amplitude: f64) -> Result<Self> {
        Self::from_positive_modes(n as usize, [(n, Complex64::new(0.0, -amplitude / 2.0))])
    }

    /// Single complex exponential `amplitude · e^{2πikx}`.
    pub fn exponential(k: i64, amplitude: Complex64) -> Result<Self> {
        Self::new(k.unsigned_abs() as usize, false, [(k, amplitude)])
    }

    pub fn max_freq(&self) -> usize {
        self.max_freq
    }

    pub fn is_real_symmetric(&self) -> bool {
        self.real_symmetric
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    /// Nonzero coefficients in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// `Σ |ĉ(k)|`, an upper bound for `sup |f|`.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    fn map_coeffs(&self, real_symmetric: bool, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&k, &c)| (k, f(k, c)))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        FourierFunction {
            coeffs,
            max_freq: self.max_freq,
            real_symmetric,
        }
    }

    /// `w · f`; stays real only for real `w`.
    pub fn scale(&self, w: Complex64) -> Self {
        self.map_coeffs(self.real_symmetric && w.im == 0.0, |_, c| c * w)
    }

    /// `self + w · other`.
    pub fn add_scaled(&self, w: Complex64, other: &FourierFunction) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &other.coeffs {
            *coeffs.entry(k).or_default() += w * c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        FourierFunction {
            coeffs,
            max_freq: self.max_freq.max(other.max_freq),
            real_symmetric: self.real_symmetric && other.real_symmetric && w.im == 0.0,
        }
    }

    /// Translate by `tau`: `g(x) = f(x + tau)`.
    pub fn translate(&self, tau: f64) -> Self {
        let phase = 2.0 * PI * tau;
        self.map_coeffs(self.real_symmetric, |k, c| {
            c * Complex64::from_polar(1.0, phase * k as f64)
        })
    }

    /// `‖f‖_s = (Σ ⟨k⟩^{2s} |ĉ(k)|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: SobolevIndex) -> f64 {
        self.coeffs
            .iter()
            .map(|(&k, c)| bracket(k).powf(2.0 * s.0) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// The multiplier family `φ_z` with coefficients `⟨k⟩^{s-z} ĉ(k)`.
    pub fn deform(&self, s: SobolevIndex, z: Complex64) -> Self {
        let w = Complex64::new(s.0, 0.0) - z;
        if w == Complex64::new(0.0, 0.0) {
            return self.clone();
        }
        self.map_coeffs(self.real_symmetric && z.im == 0.0, |k, c| c * bracket_pow(k, w))
    }

    /// Bilinear pairing `∫₀¹ f g dx = Σ ĉ_f(k) ĉ_g(-k)`.
    pub fn bilinear_pair(&self, other: &FourierFunction) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&k, &c)| c * other.coeff(-k))
            .sum()
    }

    /// Hermitian product `∫₀¹ f ḡ dx = Σ ĉ_f(k) conj(ĉ_g(k))`.
    pub fn hermitian_pair(&self, other: &FourierFunction) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&k, &c)| c * other.coeff(k).conj())
            .sum()
    }

    /// `⟨f, sin 2πnx⟩ = (ĉ(-n) - ĉ(n)) / (2i)`.
    pub fn sine_coefficient(&self, n: u32) -> Complex64 {
        let n = n as i64;
        (self.coeff(-n) - self.coeff(n)) / Complex64::new(0.0, 2.0)
    }

    /// `⟨f, cos 2πnx⟩ = (ĉ(n) + ĉ(-n)) / 2`.
    pub fn cosine_coefficient(&self, n: u32) -> Complex64 {
        let n = n as i64;
        (self.coeff(n) + self.coeff(-n)) * 0.5
    }

    /// Pointwise synthesis `Σ ĉ(k) e^{2πikx}`.
    pub fn value_at(&self, x: f64) -> Complex64 {
        if self.coeffs.is_empty() {
            return Complex64::default();
        }
        let base = Complex64::from_polar(1.0, 2.0 * PI * x);
        if self.real_symmetric {
            let mut acc = Complex64::default();
            let mut w = Complex64::new(1.0, 0.0);
            let mut prev = 0;
            for (&k, &c) in self.coeffs.range(1..) {
                w *= pow_step(base, k - prev);
                prev = k;
                acc += c * w;
            }
            Complex64::new(2.0 * acc.re, 0.0)
        } else {
            let inv = base.conj();
            let mut acc = Complex64::default();
            let mut w = Complex64::new(1.0, 0.0);
            let mut prev = 0;
            for (&k, &c) in self.coeffs.range(1..) {
                w *= pow_step(base, k - prev);
                prev = k;
                acc += c * w;
            }
            let mut w = Complex64::new(1.0, 0.0);
            let mut prev = 0;
            for (&k, &c) in self.coeffs.range(..0).rev() {
                w *= pow_step(inv, prev - k);
                prev = k;
                acc += c * w;
            }
            acc
        }
    }

    pub fn evaluate(&self, xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| self.value_at(x)).collect()
    }

    /// Real parts of [`evaluate`](Self::evaluate); only for real functions.
    pub fn evaluate_real(&self, xs: &[f64]) -> Result<Vec<f64>> {
        if !self.real_symmetric {
            return Err(Error::invalid("evaluate_real needs a real_symmetric function"));
        }
        Ok(xs.iter().map(|&x| self.value_at(x).re).collect())
    }
}

fn pow_step(base: Complex64, e: i64) -> Complex64 {
    match e {
        1 => base,
        _ => base.powi(e as i32),
    }
}

/// Deterministic random real function in the open `H^s` ball of radius
/// `radius`, with `‖f‖_s = (1 - margin) · radius` and every mode
/// `1 ≤ |k| ≤ max_freq` present.
///
/// Mode `k` gets magnitude proportional to `(1+k)^{-s-1/2-0.01}` and a
/// uniformly random phase, so the sample sits at the edge of `H^s`.
pub fn sample_ball(
    s: SobolevIndex,
    radius: f64,
    max_freq: usize,
    margin: f64,
    seed: u64,
) -> Result<FourierFunction> {
    if max_freq == 0 {
        return Err(Error::invalid("sample_ball needs max_freq >= 1"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("radius must be positive"));
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::invalid("margin must lie in (0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decay = s.0 + 0.5 + SAMPLE_DECAY_EXCESS;
    let modes: Vec<(u32, Complex64)> = (1..=max_freq as u32)
        .map(|k| {
            let phase = rng.gen::<f64>() * 2.0 * PI;
            (k, Complex64::from_polar(bracket(k as i64).powf(-decay), phase))
        })
        .collect();
    let raw = FourierFunction::from_positive_modes(max_freq, modes)?;
    let target = (1.0 - margin) * radius;
    Ok(raw.scale(Complex64::new(target / raw.sobolev_norm(s), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sidx(s: f64) -> SobolevIndex {
        SobolevIndex::new(s).unwrap()
    }

    #[test]
    fn norms_of_simple_modes() {
        let e1 = FourierFunction::exponential(1, c(1.0, 0.0)).unwrap();
        assert_relative_eq!(e1.sobolev_norm(sidx(1.0)), 2.0);
        assert_eq!(FourierFunction::zero(4).sobolev_norm(sidx(3.0)), 0.0);
        let s1 = FourierFunction::sine(1, 1.0).unwrap();
        assert_eq!(s1.coeff(1), c(0.0, -0.5));
        assert_eq!(s1.coeff(-1), c(0.0, 0.5));
        assert_relative_eq!(s1.sobolev_norm(SobolevIndex::ZERO), 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FourierFunction::new(2, false, [(0, c(1.0, 0.0))]).is_err());
        assert!(FourierFunction::new(2, false, [(3, c(1.0, 0.0))]).is_err());
        assert!(FourierFunction::new(2, true, [(1, c(1.0, 1.0)), (-1, c(1.0, 1.0))]).is_err());
        assert!(FourierFunction::new(2, false, [(1, c(1.0, 0.0)), (1, c(2.0, 0.0))]).is_err());
        assert!(SobolevIndex::new(-0.5).is_err());
        // an explicit zero at k = 0 is fine and dropped
        let f = FourierFunction::new(2, true, [(0, c(0.0, 0.0))]).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn deform_examples() {
        let e1 = FourierFunction::exponential(1, c(1.0, 0.0)).unwrap();
        let d = e1.deform(sidx(1.0), c(0.0, 0.0));
        assert_relative_eq!(d.coeff(1).re, 2.0, epsilon = 1e-15);
        let q = sample_ball(sidx(0.7), 1.0, 9, 0.1, 3).unwrap();
        assert_eq!(q.deform(sidx(0.7), c(0.7, 0.0)), q);
        let z = c(0.2, -3.0);
        let lhs = q.deform(sidx(0.7), z).sobolev_norm(sidx(0.2));
        assert_relative_eq!(lhs, q.sobolev_norm(sidx(0.7)), max_relative = 1e-13);
        assert!(!q.deform(sidx(0.7), z).is_real_symmetric());
    }

    #[test]
    fn pairings() {
        for n in 1..5 {
            let s = FourierFunction::sine(n, 1.0).unwrap();
            let co = FourierFunction::cosine(n, 1.0).unwrap();
            assert_relative_eq!(s.bilinear_pair(&s).re, 0.5, epsilon = 1e-15);
            assert_eq!(s.bilinear_pair(&co), c(0.0, 0.0));
            assert_eq!(s.bilinear_pair(&FourierFunction::zero(3)), c(0.0, 0.0));
            assert_relative_eq!(s.hermitian_pair(&s).re, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn trig_coefficients() {
        let s1 = FourierFunction::sine(1, 1.0).unwrap();
        assert_relative_eq!(s1.sine_coefficient(1).re, 0.5);
        assert_eq!(FourierFunction::cosine(1, 1.0).unwrap().sine_coefficient(1), c(0.0, 0.0));
        assert_eq!(FourierFunction::sine(2, 1.0).unwrap().sine_coefficient(1), c(0.0, 0.0));
        let q = sample_ball(sidx(0.0), 2.0, 6, 0.2, 11).unwrap();
        for n in 1..=6 {
            assert_relative_eq!(q.sine_coefficient(n).re, -q.coeff(n as i64).im, epsilon = 1e-15);
            assert_relative_eq!(q.cosine_coefficient(n).re, q.coeff(n as i64).re, epsilon = 1e-15);
        }
    }

    #[test]
    fn sampling_contract() {
        assert!(sample_ball(sidx(1.0), 1.0, 0, 0.1, 0).is_err());
        for seed in 0..8 {
            let q = sample_ball(sidx(1.5), 3.0, 20, 0.25, seed).unwrap();
            assert!(q.is_real_symmetric());
            assert_eq!(q.coeff(0), c(0.0, 0.0));
            assert_relative_eq!(q.sobolev_norm(sidx(1.5)), 0.75 * 3.0, max_relative = 1e-12);
            assert!(q.sobolev_norm(sidx(2.5)) >= q.sobolev_norm(sidx(1.5)));
            assert_eq!(q, sample_ball(sidx(1.5), 3.0, 20, 0.25, seed).unwrap());
        }
    }

    #[test]
    fn evaluation() {
        let co = FourierFunction::cosine(1, 1.0).unwrap();
        assert_relative_eq!(co.value_at(0.0).re, 1.0);
        let s1 = FourierFunction::sine(1, 1.0).unwrap();
        assert_relative_eq!(s1.value_at(0.25).re, 1.0, epsilon = 1e-15);
        assert!(FourierFunction::zero(3).evaluate(&[0.1, 0.5]).iter().all(|v| *v == c(0.0, 0.0)));
        // the real fast path agrees with the generic sum
        let q = sample_ball(sidx(0.5), 1.0, 12, 0.1, 5).unwrap();
        let generic = FourierFunction::new(12, false, q.iter()).unwrap();
        for &x in &[0.0, 0.13, 0.5, 0.77] {
            let a = q.value_at(x);
            let b = generic.value_at(x);
            assert!((a - b).norm() < 1e-13);
            assert!(b.im.abs() < 1e-13);
        }
    }

    #[test]
    fn parseval_against_grid_quadrature() {
        let q = sample_ball(sidx(0.3), 1.5, 16, 0.1, 9).unwrap();
        let m = 4 * 16;
        let xs: vec::Vec<f64> = (0..m).map(|j| j as f64 / m as f64).collect();
        let quad: f64 = q.evaluate(&xs).iter().map(|v| v.norm_sqr()).sum::<f64>() / m as f64;
        assert_relative_eq!(quad, q.sobolev_norm(SobolevIndex::ZERO).powi(2), max_relative = 1e-10);
    }
}
