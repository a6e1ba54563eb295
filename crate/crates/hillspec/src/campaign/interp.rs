use hillspec_core::fourier::sample_ball;
use hillspec_core::interpolation::{
    extremal_test_vector, interpolated_norm_check, random_dual, uniform_grid, AnalyticMap, BoundaryBounds,
    ConvolutionSquare, DiagonalMultiplier, IdentityMap, InterpolationSpec, KappaResidualMap, StripLines, ZeroMap,
};
use hillspec_core::{FourierFunction, WeightedSequence};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, Check, Command, Outcome};
use crate::config::{CampaignConfig, InterpConfig, MapKind};
use crate::error::{HarnessError, Result};
use crate::formats::{strip_csv, to_json};

const PHI_STREAM: u64 = 4;
const XI_STREAM: u64 = 5;

/// Counterexamples kept per map.
const MAX_COUNTEREXAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleRecord {
    pub phi: u32,
    pub xi: u32,
    pub v: f64,
    pub value: f64,
    pub bound: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSummary {
    pub map: String,
    /// `M_a`, `M_b` measured over every sample at the norm level.
    pub m_a_hat: f64,
    pub m_b_hat: f64,
    pub bound: f64,
    pub grid_points: usize,
    pub trials: u32,
    pub passed: u32,
    /// Smallest `margin / bound` over the trials with a nonzero bound.
    pub min_relative_margin: f64,
    /// Largest `interior_max / bound` over the same trials.
    pub max_ratio: f64,
    pub norm_checks: u32,
    pub norm_checks_passed: u32,
    /// Largest `‖F(φ)‖ / bound`.
    pub max_norm_ratio: f64,
    pub counterexamples: Vec<CounterexampleRecord>,
}

fn spec_of(ic: &InterpConfig) -> Result<InterpolationSpec> {
    InterpolationSpec::new(ic.a, ic.b, ic.alpha, ic.beta, ic.p, ic.radius, ic.s).map_err(HarnessError::from)
}

fn build_map(kind: MapKind, ic: &InterpConfig) -> Box<dyn AnalyticMap> {
    match kind {
        MapKind::Zero => Box::new(ZeroMap),
        MapKind::Identity => Box::new(IdentityMap { max_freq: ic.max_freq }),
        MapKind::Multiplier => Box::new(DiagonalMultiplier::bracket_power(ic.alpha, ic.max_freq)),
        MapKind::ConvolutionSquare => Box::new(ConvolutionSquare { max_freq: ic.max_freq }),
        MapKind::KappaResidual => Box::new(KappaResidualMap {
            n_r: ic.kappa_n_r,
            n_max: ic.kappa_n_max,
            tol: ic.tol,
        }),
    }
}

/// Inputs with `H^s` norms spread evenly over `[0.05 R, 0.95 R]`.
fn phi_samples(ic: &InterpConfig, seed: u64) -> Result<Vec<FourierFunction>> {
    let count = ic.phi_samples;
    (0..count)
        .map(|i| {
            let fraction = 0.95 - 0.9 * (i as f64 / count as f64);
            let sob = hillspec_core::SobolevIndex::new(ic.s)?;
            Ok(sample_ball(
                sob,
                ic.radius * fraction / 0.95,
                ic.max_freq,
                0.05,
                derive_seed(seed, PHI_STREAM, i as u64),
            )?)
        })
        .collect()
}

struct PhiResult {
    bounds: BoundaryBounds,
    reports: Vec<hillspec_core::interpolation::StripReport>,
    heat: Option<Vec<(f64, f64, f64)>>,
}

/// Three-lines and interpolated-norm checks for every selected map over
/// `phi_samples × xi_per_phi` pairs. The first test vector of each input
/// is the Hölder extremal of `F(φ)`; the rest are random. Writes
/// `interp.json` and `strip_<map>.csv` with `|f|` for the first pair.
pub fn run(config: &CampaignConfig) -> Result<Outcome> {
    let ic = &config.interp;
    let spec = spec_of(ic)?;
    let grid = uniform_grid(ic.v_max, ic.v_points);
    let phis = phi_samples(ic, config.seed)?;
    let mut files = Vec::new();
    let mut checks = Vec::new();
    let mut summaries = Vec::new();
    for &kind in &ic.maps {
        let map = build_map(kind, ic);
        let per_phi = phis
            .par_iter()
            .enumerate()
            .map(|(i, phi)| check_phi(map.as_ref(), &spec, ic, phi, i, config.seed, &grid))
            .collect::<Result<Vec<_>>>()?;

        let bounds = per_phi
            .iter()
            .skip(1)
            .fold(per_phi[0].bounds, |acc, r| acc.merge(&r.bounds));
        let mut s = MapSummary {
            map: map.name(),
            m_a_hat: bounds.m_a_hat,
            m_b_hat: bounds.m_b_hat,
            bound: bounds.bound(&spec),
            grid_points: grid.len(),
            trials: 0,
            passed: 0,
            min_relative_margin: f64::INFINITY,
            max_ratio: 0.0,
            norm_checks: 0,
            norm_checks_passed: 0,
            max_norm_ratio: 0.0,
            counterexamples: Vec::new(),
        };
        for (i, r) in per_phi.iter().enumerate() {
            for (j, rep) in r.reports.iter().enumerate() {
                s.trials += 1;
                s.passed += u32::from(rep.passed());
                if rep.bound > 0.0 {
                    s.min_relative_margin = s.min_relative_margin.min(rep.margin / rep.bound);
                    s.max_ratio = s.max_ratio.max(rep.interior_max / rep.bound);
                }
                if let Some(c) = rep.counterexample {
                    if s.counterexamples.len() < MAX_COUNTEREXAMPLES {
                        s.counterexamples.push(CounterexampleRecord {
                            phi: i as u32,
                            xi: j as u32,
                            v: c.v,
                            value: c.value,
                            bound: c.bound,
                            tolerance: rep.tolerance,
                        });
                    }
                }
            }
        }
        // norm check against the bounds pooled over all samples
        for phi in &phis {
            let nr = interpolated_norm_check(map.as_ref(), &spec, phi, &bounds)?;
            s.norm_checks += 1;
            s.norm_checks_passed += u32::from(nr.pass);
            if nr.bound > 0.0 {
                s.max_norm_ratio = s.max_norm_ratio.max(nr.norm / nr.bound);
            }
        }
        if !s.min_relative_margin.is_finite() {
            s.min_relative_margin = 0.0;
        }

        checks.push(Check::new(
            format!("{}: three-lines bound", s.map),
            s.passed == s.trials,
            format!(
                "{}/{} pairs pass, worst interior/bound {:.6}, grid {} points",
                s.passed, s.trials, s.max_ratio, s.grid_points
            ),
        ));
        checks.push(Check::new(
            format!("{}: interpolated norm bound", s.map),
            s.norm_checks_passed == s.norm_checks,
            format!(
                "{}/{} inputs pass, M_a = {:.4e}, M_b = {:.4e}, worst norm/bound {:.6}",
                s.norm_checks_passed, s.norm_checks, s.m_a_hat, s.m_b_hat, s.max_norm_ratio
            ),
        ));
        if let Some(heat) = per_phi.into_iter().next().and_then(|r| r.heat) {
            files.push((format!("strip_{}.csv", file_stem(kind)), strip_csv(&heat)?));
        }
        summaries.push(s);
    }
    files.insert(0, ("interp.json".into(), to_json(&summaries)?));
    Ok(Outcome {
        command: Command::Interp,
        files,
        checks,
    })
}

fn file_stem(kind: MapKind) -> &'static str {
    match kind {
        MapKind::Zero => "zero",
        MapKind::Identity => "identity",
        MapKind::Multiplier => "multiplier",
        MapKind::ConvolutionSquare => "convolution_square",
        MapKind::KappaResidual => "kappa_residual",
    }
}

fn check_phi(
    map: &dyn AnalyticMap,
    spec: &InterpolationSpec,
    ic: &InterpConfig,
    phi: &FourierFunction,
    index: usize,
    seed: u64,
    grid: &[f64],
) -> Result<PhiResult> {
    let lines = StripLines::sample(map, spec, phi, grid)?;
    let mut xis: Vec<WeightedSequence> = Vec::with_capacity(ic.xi_per_phi as usize);
    if !lines.center.is_empty() {
        xis.push(extremal_test_vector(&lines.center, spec, ic.xi_max_freq)?);
    }
    let mut j = 0;
    while xis.len() < ic.xi_per_phi as usize {
        let s = derive_seed(seed, XI_STREAM, (index as u64) << 32 | j);
        xis.push(random_dual(spec, ic.xi_max_freq, s));
        j += 1;
    }
    let reports = xis.iter().map(|xi| lines.check(xi)).collect();
    let heat = (index == 0).then(|| {
        let moduli = lines.strip_moduli(&xis[0]);
        let us = [spec.a, spec.s, spec.b];
        us.iter()
            .zip(&moduli)
            .flat_map(|(&u, line)| grid.iter().zip(line).map(move |(&v, &m)| (u, v, m)))
            .collect()
    });
    Ok(PhiResult {
        bounds: lines.boundary_bounds(),
        reports,
        heat,
    })
}
