//! Spectral quantities of the one-dimensional Schrödinger operator
//! `L(q) = -d²/dx² + q` with a band-limited, mean-zero, 1-periodic potential,
//! together with a constructive checker for the nonlinear Riesz–Thorin
//! interpolation bound obtained from the three-lines theorem.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, command line or threads lives in the `hillspec` companion
//! crate.
//!
//! Module map:
//!
//! * [`fourier`]: band-limited mean-zero functions on the circle with their
//!   Sobolev norms and the `φ_z` deformation.
//! * [`sequence`]: finitely supported `ℤ`-indexed sequences in weighted
//!   `ℓ^{p,t}` spaces, with the dual deformation `ξ_z`.
//! * [`propagator`]: Gauss–Legendre collocation for the fundamental matrix
//!   `M(x, λ)` and its λ-derivatives.
//! * [`schrodinger`]: Dirichlet and periodic spectra, Floquet exponents
//!   `κ_n`, residual sequences and the complex continuation check.
//! * [`interpolation`]: strip construction, boundary bounds, three-lines
//!   verification and the linear Riesz–Thorin baseline.
//! * [`fit`]: log-log decay fits and weighted residual sums.
#![no_std]
// `!(x < y)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod fit;
pub mod fourier;
pub mod interpolation;
pub mod propagator;
pub mod roots;
pub mod schrodinger;
pub mod sequence;

pub use error::{Error, Result};
pub use fourier::{FourierFunction, SobolevIndex};
pub use propagator::{FundamentalMatrix, Propagator};
pub use sequence::{NormSpec, WeightedSequence};

pub use num_complex::Complex64;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

/// `⟨k⟩ = 1 + |k|`, the weight used by every norm in the crate.
#[inline]
pub fn bracket(k: i64) -> f64 {
    1.0 + k.unsigned_abs() as f64
}

/// `⟨k⟩^w` for a complex exponent, computed as `exp(w · ln⟨k⟩)`.
#[inline]
pub(crate) fn bracket_pow(k: i64, w: Complex64) -> Complex64 {
    let l = bracket(k).ln();
    if l == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    (w * l).exp()
}
