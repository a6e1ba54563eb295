//! Decay-rate fits and weighted sums for residual sequences `(n, r_n)`.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Fewest points with `n > n_split` a fit accepts.
pub const MIN_FIT_POINTS: usize = 8;

/// Residuals at or below this magnitude are treated as numerically zero.
pub const DEFAULT_FLOOR: f64 = 1e-13;

/// Least-squares fit of `log|r_n| = c + slope · log n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// `None` when too few residuals rise above the floor ("below floor").
    pub slope: Option<f64>,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub half_width: f64,
    /// Points entering the regression.
    pub points_used: usize,
}

/// Fits the points with `n > n_split` and `|r_n| > floor`.
pub fn decay_fit(residuals: &[(u32, f64)], n_split: u32, floor: f64) -> Result<DecayFit> {
    let tail: Vec<(u32, f64)> = residuals.iter().copied().filter(|&(n, _)| n > n_split).collect();
    if tail.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: tail.len(),
        });
    }
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .filter(|&&(_, r)| r.abs() > floor)
        .map(|&(n, r)| ((n as f64).ln(), r.abs().ln()))
        .collect();
    let m = pts.len();
    if m < 3 {
        return Ok(DecayFit {
            slope: None,
            intercept: f64::NEG_INFINITY,
            half_width: f64::INFINITY,
            points_used: m,
        });
    }
    let mf = m as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - intercept - slope * p.0;
            e * e
        })
        .sum();
    let se = (sse / (mf - 2.0) / sxx).sqrt();
    Ok(DecayFit {
        slope: Some(slope),
        intercept,
        half_width: student_t975(m - 2) * se,
        points_used: m,
    })
}

/// Two-sided 95% Student quantile, Cornish–Fisher expansion in `1/ν`.
fn student_t975(dof: usize) -> f64 {
    let z = 1.959_963_984_540_054_f64;
    let v = dof as f64;
    let z3 = z * z * z;
    let z5 = z3 * z * z;
    let z7 = z5 * z * z;
    z + (z3 + z) / (4.0 * v)
        + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * v * v)
        + (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / (384.0 * v * v * v)
}

/// `Σ_{lo < n ≤ hi} n^{2(s+1)} r_n²`.
pub fn weighted_sum(residuals: &[(u32, f64)], s: f64, lo: u32, hi: u32) -> f64 {
    residuals
        .iter()
        .filter(|&&(n, _)| n > lo && n <= hi)
        .map(|&(n, r)| (n as f64).powf(2.0 * (s + 1.0)) * r * r)
        .sum()
}

/// Residuals of one sampled potential.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedResiduals {
    pub seed: u64,
    pub residuals: Vec<(u32, f64)>,
    pub fit: DecayFit,
    /// Tail sum `Σ_{n > n_R} n^{2(s+1)} r_n²`.
    pub weighted_sum: f64,
    /// `max_{n ≤ n_R} |r_n|`.
    pub head_max: f64,
}

/// Decay statistics of a residual sequence over a seed ensemble, split at
/// `n_R` into a head bounded crudely and a tail bounded by the sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub s: f64,
    pub n_split: u32,
    pub floor: f64,
    pub seeds: Vec<SeedResiduals>,
    /// Largest fitted slope over seeds; `None` if some seed is below floor.
    pub worst_slope: Option<f64>,
    /// `max` over seeds of the tail sum.
    pub sup_weighted_sum: f64,
    /// `M_R = max` over seeds of `head_max`.
    pub head_max: f64,
    /// `n_R^{s+3/2} M_R`, bounding `(Σ_{n ≤ n_R} n^{2(s+1)} r_n²)^{1/2}`.
    pub head_bound: f64,
    /// `max` over seeds of the full weighted `ℓ²` norm.
    pub total_norm: f64,
}

impl ResidualReport {
    pub fn build(s: f64, n_split: u32, floor: f64, seeds: Vec<(u64, Vec<(u32, f64)>)>) -> Result<Self> {
        let mut out = Vec::with_capacity(seeds.len());
        for (seed, residuals) in seeds {
            let fit = decay_fit(&residuals, n_split, floor)?;
            let weighted_sum = weighted_sum(&residuals, s, n_split, u32::MAX);
            let head_max = residuals
                .iter()
                .filter(|&&(n, _)| n <= n_split)
                .map(|&(_, r)| r.abs())
                .fold(0.0, f64::max);
            out.push(SeedResiduals {
                seed,
                residuals,
                fit,
                weighted_sum,
                head_max,
            });
        }
        let worst_slope = out.iter().try_fold(f64::NEG_INFINITY, |acc, x| x.fit.slope.map(|v| acc.max(v)));
        let head_max = out.iter().map(|x| x.head_max).fold(0.0, f64::max);
        let total_norm = out
            .iter()
            .map(|x| weighted_sum(&x.residuals, s, 0, u32::MAX).sqrt())
            .fold(0.0, f64::max);
        Ok(ResidualReport {
            s,
            n_split,
            floor,
            worst_slope: if out.is_empty() { None } else { worst_slope },
            sup_weighted_sum: out.iter().map(|x| x.weighted_sum).fold(0.0, f64::max),
            head_max,
            head_bound: (n_split as f64).powf(s + 1.5) * head_max,
            total_norm,
            seeds: out,
        })
    }

    /// `√(sup tail sum)`.
    pub fn tail_norm(&self) -> f64 {
        self.sup_weighted_sum.sqrt()
    }

    /// Whether `total ≤ head bound + tail` for every seed.
    pub fn split_holds(&self) -> bool {
        self.seeds.iter().all(|x| {
            let total = weighted_sum(&x.residuals, self.s, 0, u32::MAX).sqrt();
            total <= (self.head_bound + x.weighted_sum.sqrt()) * (1.0 + 1e-12)
        })
    }
}
