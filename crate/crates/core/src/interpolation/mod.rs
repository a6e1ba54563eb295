//! Three-lines verification of the nonlinear interpolation bound
//!
//! ```text
//! ‖F(φ)‖_{p,α+βs} ≤ M_a^{1-λ} M_b^λ,   s = (1-λ)a + λb,
//! ```
//!
//! for a map `F` bounded by `M_a` on `B^a_ℂ(R)` and by `M_b` on `B^b_ℂ(R)`.
//! For `φ ∈ B^s(R)` and finitely supported `ξ` the function
//! `f(z) = ⟨F(φ_z), ξ_z⟩` is analytic on the strip `a ≤ Re z ≤ b`, and its
//! suprema on the boundary lines control it inside. Everything here samples
//! those lines on a finite grid of `v = Im z`, so the boundary constants are
//! measured suprema over the samples evaluated, not proven bounds.

mod maps;

pub use maps::{AnalyticMap, ConvolutionSquare, DiagonalMultiplier, IdentityMap, KappaResidualMap, ZeroMap};

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fourier::{FourierFunction, SobolevIndex};
use crate::sequence::{NormSpec, WeightedSequence};
use crate::{bracket, Error, Result};

/// Relative slack of the three-lines and norm checks for maps evaluated in
/// closed form.
pub const REL_TOL: f64 = 1e-9;

/// Parameters of one interpolation problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationSpec {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub radius: f64,
    pub s: f64,
    /// `λ` with `s = (1-λ)a + λb`.
    pub lambda_weight: f64,
}

impl InterpolationSpec {
    pub fn new(a: f64, b: f64, alpha: f64, beta: f64, p: f64, radius: f64, s: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a && b.is_finite()) {
            return Err(Error::invalid(alloc::format!("need 0 <= a < b, got a = {a}, b = {b}")));
        }
        if !(alpha >= 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid("need alpha >= 0 and beta > 0"));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::invalid("need 1 <= p < infinity"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("radius must be positive"));
        }
        if !(s >= a && s <= b) {
            return Err(Error::invalid(alloc::format!("s = {s} outside [{a}, {b}]")));
        }
        Ok(InterpolationSpec {
            a,
            b,
            alpha,
            beta,
            p,
            radius,
            s,
            lambda_weight: (s - a) / (b - a),
        })
    }

    /// Spec with `s = (1-λ)a + λb`.
    pub fn with_weight(a: f64, b: f64, alpha: f64, beta: f64, p: f64, radius: f64, lambda_weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda_weight) {
            return Err(Error::invalid("lambda_weight must lie in [0, 1]"));
        }
        let s = if lambda_weight == 1.0 { b } else { (1.0 - lambda_weight) * a + lambda_weight * b };
        let mut spec = Self::new(a, b, alpha, beta, p, radius, s)?;
        spec.lambda_weight = lambda_weight;
        Ok(spec)
    }

    pub fn sobolev(&self) -> SobolevIndex {
        SobolevIndex::new(self.s).expect("s >= a >= 0")
    }

    /// `(p, α + βu)`, the target norm on line `Re z = u`.
    pub fn target_norm(&self, u: f64) -> NormSpec {
        NormSpec {
            p: self.p,
            t: self.alpha + self.beta * u,
        }
    }

    /// `(q, -(α + βu))`.
    pub fn dual_norm(&self, u: f64) -> NormSpec {
        self.target_norm(u).dual()
    }

    /// `x_a^{1-λ} x_b^λ`.
    pub fn geometric_mean(&self, xa: f64, xb: f64) -> f64 {
        let l = self.lambda_weight;
        if l == 0.0 {
            xa
        } else if l == 1.0 {
            xb
        } else {
            xa.powf(1.0 - l) * xb.powf(l)
        }
    }

    fn check_strip(&self, z: Complex64) -> Result<()> {
        let slack = 1e-12 * self.b.max(1.0);
        if z.re < self.a - slack || z.re > self.b + slack || !z.im.is_finite() {
            return Err(Error::OutsideStrip {
                re: z.re,
                im: z.im,
                a: self.a,
                b: self.b,
            });
        }
        Ok(())
    }

    fn check_ball(&self, phi: &FourierFunction) -> Result<()> {
        let norm = phi.sobolev_norm(self.sobolev());
        if !(norm < self.radius) {
            return Err(Error::invalid(alloc::format!(
                "sample has H^{} norm {norm}, not below the radius {}",
                self.s,
                self.radius
            )));
        }
        Ok(())
    }
}

/// `n` equally spaced points on `[-v_max, v_max]` (just `0` for `n = 1`).
pub fn uniform_grid(v_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..n)
            .map(|i| -v_max + 2.0 * v_max * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `f(z) = ⟨F(φ_z), ξ_z⟩ = Σ_k F_k(φ_z) ⟨k⟩^{-β(s-z)} ξ_k`.
pub fn strip_function(
    map: &dyn AnalyticMap,
    spec: &InterpolationSpec,
    phi: &FourierFunction,
    xi: &WeightedSequence,
    z: Complex64,
) -> Result<Complex64> {
    spec.check_strip(z)?;
    let image = map.apply(&phi.deform(spec.sobolev(), z))?;
    Ok(image.pair(&xi.dual_deform(spec.s, spec.beta, z)))
}

/// Measured `(M_a, M_b)`: the largest `‖F(φ_{u+iv})‖_{p,α+βu}` over the
/// samples and the grid, on `u = a` and `u = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryBounds {
    pub m_a_hat: f64,
    pub m_b_hat: f64,
    pub samples: usize,
    pub grid_points: usize,
}

impl BoundaryBounds {
    pub fn bound(&self, spec: &InterpolationSpec) -> f64 {
        spec.geometric_mean(self.m_a_hat, self.m_b_hat)
    }

    /// Running maximum with another measurement.
    pub fn merge(&self, other: &BoundaryBounds) -> BoundaryBounds {
        BoundaryBounds {
            m_a_hat: self.m_a_hat.max(other.m_a_hat),
            m_b_hat: self.m_b_hat.max(other.m_b_hat),
            samples: self.samples + other.samples,
            grid_points: self.grid_points.max(other.grid_points),
        }
    }
}

pub fn boundary_bounds(
    map: &dyn AnalyticMap,
    spec: &InterpolationSpec,
    phi_samples: &[FourierFunction],
    v_grid: &[f64],
) -> Result<BoundaryBounds> {
    let mut out = BoundaryBounds {
        m_a_hat: 0.0,
        m_b_hat: 0.0,
        samples: 0,
        grid_points: v_grid.len(),
    };
    for phi in phi_samples {
        let lines = StripLines::sample(map, spec, phi, v_grid)?;
        out = out.merge(&lines.boundary_bounds());
    }
    Ok(out)
}

/// `F(φ_z)` on the three lines `Re z ∈ {a, s, b}` over a grid of `Im z`.
/// Computed once per `φ` and reused for any number of test vectors `ξ`.
#[derive(Debug, Clone)]
pub struct StripLines {
    spec: InterpolationSpec,
    pub v_grid: Vec<f64>,
    /// Images on `u = a`, `u = s`, `u = b`.
    pub lines: [Vec<WeightedSequence>; 3],
    /// `F(φ)` itself.
    pub center: WeightedSequence,
    error_scale: f64,
}

impl StripLines {
    pub fn sample(
        map: &dyn AnalyticMap,
        spec: &InterpolationSpec,
        phi: &FourierFunction,
        v_grid: &[f64],
    ) -> Result<Self> {
        spec.check_ball(phi)?;
        if v_grid.is_empty() {
            return Err(Error::invalid("empty v grid"));
        }
        let sob = spec.sobolev();
        let line = |u: f64| -> Result<Vec<WeightedSequence>> {
            v_grid
                .iter()
                .map(|&v| map.apply(&phi.deform(sob, Complex64::new(u, v))))
                .collect()
        };
        Ok(StripLines {
            spec: *spec,
            v_grid: v_grid.to_vec(),
            lines: [line(spec.a)?, line(spec.s)?, line(spec.b)?],
            center: map.apply(phi)?,
            error_scale: map.error_scale(),
        })
    }

    fn us(&self) -> [f64; 3] {
        [self.spec.a, self.spec.s, self.spec.b]
    }

    /// Per-sample `(M_a, M_b)` at the norm level.
    pub fn boundary_bounds(&self) -> BoundaryBounds {
        let sup = |i: usize| {
            let u = self.us()[i];
            self.lines[i]
                .iter()
                .map(|img| img.weighted_norm(self.spec.target_norm(u)))
                .fold(0.0, f64::max)
        };
        BoundaryBounds {
            m_a_hat: sup(0),
            m_b_hat: sup(2),
            samples: 1,
            grid_points: self.v_grid.len(),
        }
    }

    /// `|f(u + iv)|` on the three lines.
    pub fn strip_moduli(&self, xi: &WeightedSequence) -> [Vec<f64>; 3] {
        let us = self.us();
        core::array::from_fn(|i| {
            self.lines[i]
                .iter()
                .zip(&self.v_grid)
                .map(|(img, &v)| {
                    let xi_z = xi.dual_deform(self.spec.s, self.spec.beta, Complex64::new(us[i], v));
                    img.pair(&xi_z).norm()
                })
                .collect()
        })
    }

    /// Three-lines check of `f = ⟨F(φ_z), ξ_z⟩` on the sampled lines.
    pub fn check(&self, xi: &WeightedSequence) -> StripReport {
        let moduli = self.strip_moduli(xi);
        // absolute slack for inexact maps: 10 × entry error × Σ|ξ_z|
        let xi_mass = if self.error_scale > 0.0 {
            self.us()
                .iter()
                .flat_map(|&u| self.v_grid.iter().map(move |&v| Complex64::new(u, v)))
                .map(|z| {
                    xi.dual_deform(self.spec.s, self.spec.beta, z)
                        .iter()
                        .map(|(_, c)| c.norm())
                        .sum::<f64>()
                })
                .fold(0.0, f64::max)
        } else {
            0.0
        };
        let slack = 10.0 * self.error_scale * xi_mass;
        let mut report = StripReport::from_lines(&self.spec, &self.v_grid, &moduli, slack);
        let bb = self.boundary_bounds();
        report.norm_check = NormCheck {
            norm: self.center.weighted_norm(self.spec.target_norm(self.spec.s)),
            bound: bb.bound(&self.spec),
        };
        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormCheck {
    /// `‖F(φ)‖_{p,α+βs}`.
    pub norm: f64,
    /// `M_a^{1-λ} M_b^λ` from this sample's boundary lines.
    pub bound: f64,
}

/// A sampled point on the interior line where `|f|` beats the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counterexample {
    pub v: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripReport {
    /// `max_v |f(a + iv)|`.
    pub m_a_hat: f64,
    /// `max_v |f(b + iv)|`.
    pub m_b_hat: f64,
    /// `max_v |f(s + iv)|`.
    pub interior_max: f64,
    /// `m_a_hat^{1-λ} m_b_hat^λ`.
    pub bound: f64,
    /// `bound - interior_max`.
    pub margin: f64,
    /// Allowed excess: `REL_TOL · bound` plus the map's error allowance.
    pub tolerance: f64,
    pub norm_check: NormCheck,
    pub counterexample: Option<Counterexample>,
}

impl StripReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    /// Report from `|f|` sampled on the lines `a`, `s`, `b`.
    pub fn from_lines(spec: &InterpolationSpec, v_grid: &[f64], moduli: &[Vec<f64>; 3], slack: f64) -> StripReport {
        let sup = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
        let m_a_hat = sup(&moduli[0]);
        let m_b_hat = sup(&moduli[2]);
        let interior_max = sup(&moduli[1]);
        let bound = spec.geometric_mean(m_a_hat, m_b_hat);
        let tolerance = REL_TOL * bound + slack;
        let counterexample = moduli[1]
            .iter()
            .zip(v_grid)
            .find(|(&x, _)| x > bound + tolerance)
            .map(|(&value, &v)| Counterexample { v, value, bound });
        StripReport {
            m_a_hat,
            m_b_hat,
            interior_max,
            bound,
            margin: bound - interior_max,
            tolerance,
            norm_check: NormCheck { norm: 0.0, bound: 0.0 },
            counterexample,
        }
    }
}

/// Samples `|f|` on the three lines and checks the three-lines bound.
pub fn three_lines_check(
    map: &dyn AnalyticMap,
    spec: &InterpolationSpec,
    phi: &FourierFunction,
    xi: &WeightedSequence,
    v_grid: &[f64],
) -> Result<StripReport> {
    Ok(StripLines::sample(map, spec, phi, v_grid)?.check(xi))
}

/// Three-lines check for an arbitrary function on the strip, e.g. a
/// synthetic `e^{cz}`.
pub fn three_lines_check_fn(
    spec: &InterpolationSpec,
    v_grid: &[f64],
    f: impl Fn(Complex64) -> Complex64,
) -> StripReport {
    let us = [spec.a, spec.s, spec.b];
    let moduli: [Vec<f64>; 3] =
        core::array::from_fn(|i| v_grid.iter().map(|&v| f(Complex64::new(us[i], v)).norm()).collect());
    StripReport::from_lines(spec, v_grid, &moduli, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    /// `‖F(φ)‖_{p,α+βs}`.
    pub norm: f64,
    /// `⟨F(φ), ξ*⟩` for the Hölder extremal `ξ*` of unit dual norm.
    pub dual_pairing: f64,
    /// `M_a^{1-λ} M_b^λ`.
    pub bound: f64,
    pub pass: bool,
}

/// `‖F(φ)‖_{p,α+βs}` against the interpolated bound, with the norm
/// certified by its extremal dual pairing.
pub fn interpolated_norm_check(
    map: &dyn AnalyticMap,
    spec: &InterpolationSpec,
    phi: &FourierFunction,
    bounds: &BoundaryBounds,
) -> Result<NormReport> {
    spec.check_ball(phi)?;
    let image = map.apply(phi)?;
    let target = spec.target_norm(spec.s);
    let norm = image.weighted_norm(target);
    let dual_pairing = if image.is_empty() || spec.p == 1.0 {
        norm
    } else {
        image.pair(&image.extremal_dual(target)?).re
    };
    if (dual_pairing - norm).abs() > 1e-10 * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::Inconsistency(alloc::format!(
            "extremal pairing {dual_pairing} disagrees with the norm {norm}"
        )));
    }
    let bound = bounds.bound(spec);
    let slack = 10.0 * map.error_scale() * image.len() as f64;
    Ok(NormReport {
        norm,
        dual_pairing,
        bound,
        pass: norm <= bound * (1.0 + REL_TOL) + slack,
    })
}

/// A random `ξ` supported in `|k| ≤ k_max` with `‖ξ‖_{q,-(α+βs)} = 1`.
pub fn random_dual(spec: &InterpolationSpec, k_max: usize, seed: u64) -> WeightedSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = k_max as i64;
    let raw = WeightedSequence::from_entries((-k..=k).map(|j| {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        (j, c)
    }));
    let norm = raw.weighted_norm(spec.dual_norm(spec.s));
    raw.scale(Complex64::new(1.0 / norm, 0.0))
}

/// Hölder extremal of `F(φ)` truncated to `|k| ≤ k_max`, with unit dual norm:
/// the test vector that makes `|f(s)|` equal to the truncated norm.
pub fn extremal_test_vector(
    image: &WeightedSequence,
    spec: &InterpolationSpec,
    k_max: usize,
) -> Result<WeightedSequence> {
    image.truncate(k_max as u64).extremal_dual(spec.target_norm(spec.s))
}

/// Exact operator norms of a diagonal multiplier `F_k = m_k φ̂(k)` with
/// `p = 2`, and their numerical counterparts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineReport {
    /// `N_u = sup_k ⟨k⟩^{α+βu} |m_k| ⟨k⟩^{-u}` for `u = a, s, b`.
    pub norms: [f64; 3],
    /// The same norms measured by applying the map to unit single modes.
    pub measured: [f64; 3],
    /// `N_a^{1-λ} N_b^λ`.
    pub bound: f64,
    /// `bound - N_s`.
    pub margin: f64,
    /// Largest relative disagreement between `norms` and `measured`.
    pub mismatch: f64,
}

impl BaselineReport {
    /// `N_s / bound`; `1` in the equality case.
    pub fn ratio(&self) -> f64 {
        self.norms[1] / self.bound
    }
}

/// Linear baseline: for a diagonal multiplier the interpolation inequality
/// is the log-convexity of `u ↦ N_u`, a supremum of affine functions.
/// The zero mode of the symbol is ignored.
pub fn riesz_thorin_baseline(symbol: &WeightedSequence, spec: &InterpolationSpec) -> Result<BaselineReport> {
    if spec.p != 2.0 {
        return Err(Error::invalid("the baseline is the p = 2 case"));
    }
    let us = [spec.a, spec.s, spec.b];
    let entries: Vec<(i64, Complex64)> = symbol.iter().filter(|(k, _)| *k != 0).collect();
    if entries.is_empty() {
        return Err(Error::invalid("symbol has no nonzero mode"));
    }
    let norms = us.map(|u| {
        entries
            .iter()
            .map(|&(k, m)| bracket(k).powf(spec.alpha + spec.beta * u - u) * m.norm())
            .fold(0.0, f64::max)
    });
    let map = DiagonalMultiplier { symbol: symbol.clone() };
    let mut measured = [0.0; 3];
    for (i, &u) in us.iter().enumerate() {
        let su = SobolevIndex::new(u)?;
        for &(k, _) in &entries {
            let phi = FourierFunction::exponential(k, Complex64::new(1.0, 0.0))?;
            let phi = phi.scale(Complex64::new(1.0 / phi.sobolev_norm(su), 0.0));
            let out = map.apply(&phi)?.weighted_norm(spec.target_norm(u));
            measured[i] = f64::max(measured[i], out);
        }
    }
    let mismatch = (0..3)
        .map(|i| (norms[i] - measured[i]).abs() / norms[i].max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let bound = spec.geometric_mean(norms[0], norms[2]);
    Ok(BaselineReport {
        norms,
        measured,
        bound,
        margin: bound - norms[1],
        mismatch,
    })
}
