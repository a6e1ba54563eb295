//! Campaign configuration. Unknown keys are rejected; omitted sections take
//! defaults sized for a single desktop core.

use std::path::{Path, PathBuf};

use hillspec_core::fourier::sample_ball;
use hillspec_core::propagator::TOL_RANGE;
use hillspec_core::{FourierFunction, SobolevIndex};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::formats::FourierJson;

pub const SCHEMA_VERSION: u32 = 1;

/// Desk-scale ceilings.
pub const MAX_N: u32 = 256;
pub const MAX_SEEDS: u32 = 32;
pub const MAX_FREQ: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub schema_version: u32,
    /// Base seed; every random draw in a campaign derives from it.
    #[serde(default)]
    pub seed: u64,
    /// Output directory. Not part of the cache key.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub kappa: KappaConfig,
    #[serde(default)]
    pub residuals: ResidualConfig,
    #[serde(default)]
    pub interp: InterpConfig,
    #[serde(default)]
    pub baseline: BaselineConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            out_dir: None,
            spectrum: SpectrumConfig::default(),
            kappa: KappaConfig::default(),
            residuals: ResidualConfig::default(),
            interp: InterpConfig::default(),
            baseline: BaselineConfig::default(),
        }
    }
}

/// A potential named in a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    /// `amplitude · cos 2πnx`.
    Cosine { n: u32, amplitude: f64 },
    /// `amplitude · sin 2πnx`.
    Sine { n: u32, amplitude: f64 },
    /// A sharp sample of the `H^s` ball; `seed` is offset by the base seed.
    Sampled {
        s: f64,
        radius: f64,
        max_freq: usize,
        #[serde(default = "default_margin")]
        margin: f64,
        #[serde(default)]
        seed: u64,
    },
    Explicit { function: FourierJson },
}

impl PotentialSpec {
    pub fn build(&self, base_seed: u64) -> Result<FourierFunction> {
        Ok(match self {
            PotentialSpec::Zero => FourierFunction::zero(1),
            PotentialSpec::Cosine { n, amplitude } => FourierFunction::cosine(*n, *amplitude)?,
            PotentialSpec::Sine { n, amplitude } => FourierFunction::sine(*n, *amplitude)?,
            PotentialSpec::Sampled {
                s,
                radius,
                max_freq,
                margin,
                seed,
            } => sample_ball(sobolev(*s)?, *radius, *max_freq, *margin, base_seed.wrapping_add(*seed))?,
            PotentialSpec::Explicit { function } => FourierFunction::try_from(function)?,
        })
    }

    fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Zero => Ok(()),
            PotentialSpec::Cosine { n, amplitude } | PotentialSpec::Sine { n, amplitude } => {
                ensure(*n >= 1 && *n as usize <= MAX_FREQ, "mode index must lie in 1..=128")?;
                ensure(amplitude.is_finite(), "amplitude must be finite")
            }
            PotentialSpec::Sampled {
                s,
                radius,
                max_freq,
                margin,
                ..
            } => {
                sobolev(*s)?;
                check_radius(*radius)?;
                check_freq(*max_freq)?;
                ensure(*margin > 0.0 && *margin < 1.0, "margin must lie in (0, 1)")
            }
            PotentialSpec::Explicit { function } => {
                check_freq(function.max_freq)?;
                FourierFunction::try_from(function).map(|_| ())
            }
        }
    }
}

/// Which map an interpolation campaign exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Zero,
    Identity,
    Multiplier,
    ConvolutionSquare,
    KappaResidual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub potentials: Vec<PotentialSpec>,
    pub n_max: u32,
    pub tol: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            potentials: vec![PotentialSpec::Zero],
            n_max: 64,
            tol: 1e-12,
        }
    }
}

/// Floquet exponents of the configured potentials and, when `rho > 0`,
/// the complex continuation check around each of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KappaConfig {
    pub potentials: Vec<PotentialSpec>,
    pub n_max: u32,
    pub tol: f64,
    pub rho: f64,
    pub direction: PotentialSpec,
    /// Largest allowed Cauchy mean-value defect above `n_R`.
    pub defect_tol: f64,
}

impl Default for KappaConfig {
    fn default() -> Self {
        KappaConfig {
            potentials: (0..4)
                .map(|seed| PotentialSpec::Sampled {
                    s: 0.0,
                    radius: 1.5,
                    max_freq: 8,
                    margin: default_margin(),
                    seed,
                })
                .collect(),
            n_max: 32,
            tol: 1e-12,
            rho: 0.5,
            direction: PotentialSpec::Cosine { n: 1, amplitude: 2.0 },
            defect_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualConfig {
    pub s_list: Vec<f64>,
    pub radius: f64,
    pub max_freq: usize,
    pub margin: f64,
    pub seeds: u32,
    pub n_max: u32,
    pub tol: f64,
    /// First `n` entering the decay fit; `n_R = fit_from - 1`.
    pub fit_from: u32,
    pub floor: f64,
    pub slope_slack: f64,
    /// Shorter horizon for the stability comparison of weighted sums.
    pub stability_n: u32,
    pub stability_tol: f64,
}

impl Default for ResidualConfig {
    fn default() -> Self {
        ResidualConfig {
            s_list: vec![0.0, 0.5, 1.0, 1.5, 2.0],
            radius: 1.0,
            max_freq: 32,
            margin: default_margin(),
            seeds: 16,
            n_max: 64,
            tol: 1e-13,
            fit_from: 5,
            floor: 1e-13,
            slope_slack: 0.25,
            stability_n: 48,
            stability_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterpConfig {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub radius: f64,
    pub s: f64,
    pub maps: Vec<MapKind>,
    /// Band of the sampled inputs `φ`.
    pub max_freq: usize,
    pub phi_samples: u32,
    pub xi_per_phi: u32,
    /// Support radius of the random test vectors `ξ`.
    pub xi_max_freq: usize,
    pub v_max: f64,
    pub v_points: usize,
    pub kappa_n_r: u32,
    pub kappa_n_max: u32,
    pub tol: f64,
}

impl Default for InterpConfig {
    fn default() -> Self {
        InterpConfig {
            a: 0.0,
            b: 1.0,
            alpha: 1.0,
            beta: 1.0,
            p: 2.0,
            radius: 1.0,
            s: 0.5,
            maps: vec![
                MapKind::Identity,
                MapKind::Multiplier,
                MapKind::ConvolutionSquare,
                MapKind::KappaResidual,
            ],
            max_freq: 4,
            phi_samples: 20,
            xi_per_phi: 50,
            xi_max_freq: 8,
            v_max: 20.0,
            v_points: 81,
            kappa_n_r: 0,
            kappa_n_max: 8,
            tol: 1e-12,
        }
    }
}

/// Random diagonal multipliers with `p = 2` and random strip parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub multipliers: u32,
    pub max_freq: usize,
    pub single_modes: u32,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            multipliers: 100,
            max_freq: 16,
            single_modes: 20,
        }
    }
}

fn default_margin() -> f64 {
    0.05
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(HarnessError::Config(msg.into()))
    }
}

fn sobolev(s: f64) -> Result<SobolevIndex> {
    SobolevIndex::new(s).map_err(|e| HarnessError::Config(e.to_string()))
}

fn check_radius(r: f64) -> Result<()> {
    ensure(r > 0.0 && r.is_finite(), "radius must be positive")
}

fn check_freq(k: usize) -> Result<()> {
    ensure((1..=MAX_FREQ).contains(&k), "band limit must lie in 1..=128")
}

fn check_n(n: u32) -> Result<()> {
    ensure((1..=MAX_N).contains(&n), "n_max must lie in 1..=256")
}

fn check_tol(tol: f64) -> Result<()> {
    ensure(
        tol >= TOL_RANGE.0 && tol <= TOL_RANGE.1,
        &format!("tol must lie in [{:e}, {:e}]", TOL_RANGE.0, TOL_RANGE.1),
    )
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: CampaignConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.schema_version == SCHEMA_VERSION,
            &format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", self.schema_version),
        )?;

        let sp = &self.spectrum;
        check_n(sp.n_max)?;
        check_tol(sp.tol)?;
        sp.potentials.iter().try_for_each(PotentialSpec::validate)?;

        let k = &self.kappa;
        check_n(k.n_max)?;
        check_tol(k.tol)?;
        ensure(k.rho >= 0.0 && k.rho.is_finite(), "rho must be nonnegative")?;
        ensure(k.defect_tol > 0.0, "defect_tol must be positive")?;
        k.potentials.iter().try_for_each(PotentialSpec::validate)?;
        k.direction.validate()?;

        let r = &self.residuals;
        ensure(!r.s_list.is_empty(), "s_list is empty")?;
        r.s_list.iter().try_for_each(|&s| sobolev(s).map(|_| ()))?;
        check_radius(r.radius)?;
        check_freq(r.max_freq)?;
        ensure(r.margin > 0.0 && r.margin < 1.0, "margin must lie in (0, 1)")?;
        ensure((1..=MAX_SEEDS).contains(&r.seeds), "seeds must lie in 1..=32")?;
        check_n(r.n_max)?;
        check_tol(r.tol)?;
        ensure(r.fit_from >= 1, "fit_from starts at 1")?;
        ensure(
            r.stability_n >= r.fit_from && r.stability_n < r.n_max,
            "need fit_from <= stability_n < n_max",
        )?;
        ensure(r.floor >= 0.0, "floor must be nonnegative")?;
        ensure(r.slope_slack >= 0.0, "slope_slack must be nonnegative")?;
        ensure(r.stability_tol > 0.0, "stability_tol must be positive")?;

        let i = &self.interp;
        hillspec_core::interpolation::InterpolationSpec::new(i.a, i.b, i.alpha, i.beta, i.p, i.radius, i.s)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        ensure(!i.maps.is_empty(), "no maps selected")?;
        check_freq(i.max_freq)?;
        check_freq(i.xi_max_freq)?;
        ensure(i.phi_samples >= 1 && i.xi_per_phi >= 1, "sample counts must be positive")?;
        ensure(i.v_max > 0.0 && i.v_max.is_finite(), "v_max must be positive")?;
        ensure(i.v_points >= 2, "v_points must be at least 2")?;
        check_n(i.kappa_n_max)?;
        ensure(i.kappa_n_r < i.kappa_n_max, "need kappa_n_r < kappa_n_max")?;
        check_tol(i.tol)?;

        let b = &self.baseline;
        check_freq(b.max_freq)?;
        ensure(b.multipliers >= 1, "multipliers must be positive")?;
        Ok(())
    }
}
