//! Built-in analytic maps `F: H^a_ℂ → ℓ^{p,α+βa}_ℂ`.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::fourier::FourierFunction;
use crate::schrodinger::kappa_residual_sequence;
use crate::{bracket, Error, Result, WeightedSequence};

/// A map that is analytic on a complex Sobolev ball, evaluated on
/// band-limited inputs.
///
/// Analyticity is a declared property of the implementation, not something
/// the checks can decide. Implementations must be pure: the strip checks
/// evaluate them at many points, possibly from several threads.
pub trait AnalyticMap: Send + Sync {
    fn name(&self) -> String;

    /// Every output is supported in `|k| ≤ support_bound()`.
    fn support_bound(&self) -> usize;

    fn apply(&self, phi: &FourierFunction) -> Result<WeightedSequence>;

    /// Absolute error of each output entry. Zero for maps evaluated in
    /// closed form.
    fn error_scale(&self) -> f64 {
        0.0
    }
}

/// `F_k(φ) = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroMap;

impl AnalyticMap for ZeroMap {
    fn name(&self) -> String {
        "zero".into()
    }

    fn support_bound(&self) -> usize {
        0
    }

    fn apply(&self, _phi: &FourierFunction) -> Result<WeightedSequence> {
        Ok(WeightedSequence::new())
    }
}

/// `F_k(φ) = φ̂(k)` for `|k| ≤ K`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityMap {
    pub max_freq: usize,
}

impl AnalyticMap for IdentityMap {
    fn name(&self) -> String {
        "identity".into()
    }

    fn support_bound(&self) -> usize {
        self.max_freq
    }

    fn apply(&self, phi: &FourierFunction) -> Result<WeightedSequence> {
        let k_max = self.max_freq as i64;
        Ok(WeightedSequence::from_entries(phi.iter().filter(|(k, _)| k.abs() <= k_max)))
    }
}

/// `F_k(φ) = m_k φ̂(k)`. The symbol has finite support; `m_0` is never
/// used because inputs have mean zero.
#[derive(Debug, Clone)]
pub struct DiagonalMultiplier {
    pub symbol: WeightedSequence,
}

impl DiagonalMultiplier {
    /// `m_k = ⟨k⟩^{-α}` for `0 < |k| ≤ K`: a map with `M_a = M_b = R` on every
    /// level when `β = 1`.
    pub fn bracket_power(alpha: f64, max_freq: usize) -> Self {
        let k = max_freq as i64;
        let symbol = WeightedSequence::from_entries(
            (-k..=k)
                .filter(|&j| j != 0)
                .map(|j| (j, Complex64::new(bracket(j).powf(-alpha), 0.0))),
        );
        DiagonalMultiplier { symbol }
    }
}

impl AnalyticMap for DiagonalMultiplier {
    fn name(&self) -> String {
        "diagonal multiplier".into()
    }

    fn support_bound(&self) -> usize {
        self.symbol.support_radius().unwrap_or(0) as usize
    }

    fn apply(&self, phi: &FourierFunction) -> Result<WeightedSequence> {
        Ok(WeightedSequence::from_entries(
            self.symbol.iter().map(|(k, m)| (k, m * phi.coeff(k))),
        ))
    }
}

/// `F_k(φ) = (φ̂ ∗ φ̂)(k) ⟨k⟩^{-2}`, the Fourier coefficients of `φ²` with a
/// smoothing weight. Inputs are expected to be band-limited to `max_freq`.
#[derive(Debug, Clone, Copy)]
pub struct ConvolutionSquare {
    pub max_freq: usize,
}

impl AnalyticMap for ConvolutionSquare {
    fn name(&self) -> String {
        "convolution square".into()
    }

    fn support_bound(&self) -> usize {
        2 * self.max_freq
    }

    fn apply(&self, phi: &FourierFunction) -> Result<WeightedSequence> {
        if phi.max_freq() > self.max_freq {
            return Err(Error::invalid("input exceeds the declared band"));
        }
        let coeffs: Vec<(i64, Complex64)> = phi.iter().collect();
        let mut out = WeightedSequence::new();
        let k_max = 2 * self.max_freq as i64;
        for k in -k_max..=k_max {
            let conv: Complex64 = coeffs.iter().map(|&(j, c)| c * phi.coeff(k - j)).sum();
            out.set(k, conv / (bracket(k) * bracket(k)));
        }
        Ok(out)
    }
}

/// `q ↦ (2πn κ_n(q) - σ ⟨q, sin 2πnx⟩)` for `n_r < n ≤ n_max`, embedded at
/// `k = n`. Complex inputs are handled by continuation from `q = 0`; an
/// input for which some `κ_n` leaves its analyticity region is rejected.
#[derive(Debug, Clone, Copy)]
pub struct KappaResidualMap {
    pub n_r: u32,
    pub n_max: u32,
    pub tol: f64,
}

impl AnalyticMap for KappaResidualMap {
    fn name(&self) -> String {
        alloc::format!("kappa residual ({} < n <= {})", self.n_r, self.n_max)
    }

    fn support_bound(&self) -> usize {
        self.n_max as usize
    }

    fn apply(&self, phi: &FourierFunction) -> Result<WeightedSequence> {
        if self.n_r >= self.n_max {
            return Ok(WeightedSequence::new());
        }
        kappa_residual_sequence(phi, self.n_r + 1..=self.n_max, self.tol)
    }

    fn error_scale(&self) -> f64 {
        // κ_n is computed to about tol; the residual multiplies it by 2πn
        2.0 * core::f64::consts::PI * self.n_max as f64 * self.tol
    }
}
