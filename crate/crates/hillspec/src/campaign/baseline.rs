use hillspec_core::interpolation::{riesz_thorin_baseline, InterpolationSpec};
use hillspec_core::{Complex64, WeightedSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{derive_seed, Check, Command, Outcome};
use crate::config::CampaignConfig;
use crate::error::Result;
use crate::formats::{fmt_f64, to_json, write_csv};

const STREAM: u64 = 6;

/// Relative tolerance on margins and equality cases.
pub const BASELINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineRow {
    pub trial: u32,
    pub single_mode: bool,
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n_a: f64,
    pub n_s: f64,
    pub n_b: f64,
    pub bound: f64,
    /// `(bound - N_s) / bound`.
    pub relative_margin: f64,
    pub mismatch: f64,
}

pub const BASELINE_HEADER: [&str; 13] = [
    "trial", "single_mode", "a", "b", "s", "alpha", "beta", "n_a", "n_s", "n_b", "bound", "relative_margin", "mismatch",
];

fn random_spec(rng: &mut ChaCha8Rng) -> Result<InterpolationSpec> {
    let a = rng.gen_range(0.0..1.0);
    let b = a + rng.gen_range(0.25..2.0);
    let alpha = rng.gen_range(0.0..1.5);
    let beta = rng.gen_range(0.25..2.0);
    let lambda = rng.gen_range(0.05..0.95);
    Ok(InterpolationSpec::with_weight(a, b, alpha, beta, 2.0, 1.0, lambda)?)
}

/// The linear case with `p = 2`: random diagonal multipliers must satisfy
/// the interpolation inequality, and single-mode multipliers attain it.
/// Writes `baseline.json` and `baseline.csv`.
pub fn run(config: &CampaignConfig) -> Result<Outcome> {
    let bc = &config.baseline;
    let k = bc.max_freq as i64;
    let mut rows = Vec::new();
    let total = bc.multipliers + bc.single_modes;
    for trial in 0..total {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, STREAM, trial as u64));
        let spec = random_spec(&mut rng)?;
        let single_mode = trial >= bc.multipliers;
        let symbol = if single_mode {
            let mut j = rng.gen_range(1..=k);
            if rng.gen_bool(0.5) {
                j = -j;
            }
            WeightedSequence::from_entries([(j, Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(0.0..6.3)))])
        } else {
            // log-uniform magnitudes over four decades, about half the modes present
            WeightedSequence::from_entries((-k..=k).filter(|&j| j != 0).filter_map(|j| {
                let present = rng.gen_bool(0.5);
                let m = Complex64::from_polar(10f64.powf(rng.gen_range(-3.0..1.0)), rng.gen_range(0.0..6.3));
                (present || j == 1).then_some((j, m))
            }))
        };
        let r = riesz_thorin_baseline(&symbol, &spec)?;
        rows.push(BaselineRow {
            trial,
            single_mode,
            a: spec.a,
            b: spec.b,
            s: spec.s,
            alpha: spec.alpha,
            beta: spec.beta,
            n_a: r.norms[0],
            n_s: r.norms[1],
            n_b: r.norms[2],
            bound: r.bound,
            relative_margin: r.margin / r.bound,
            mismatch: r.mismatch,
        });
    }

    let general: Vec<&BaselineRow> = rows.iter().filter(|r| !r.single_mode).collect();
    let single: Vec<&BaselineRow> = rows.iter().filter(|r| r.single_mode).collect();
    let worst_margin = general.iter().map(|r| r.relative_margin).fold(f64::INFINITY, f64::min);
    let worst_equality = single.iter().map(|r| r.relative_margin.abs()).fold(0.0, f64::max);
    let worst_mismatch = rows.iter().map(|r| r.mismatch).fold(0.0, f64::max);
    let mut checks = vec![
        Check::new(
            "random multipliers satisfy the interpolation inequality",
            worst_margin >= -BASELINE_TOL,
            format!("{} multipliers, smallest relative margin {worst_margin:.3e}", general.len()),
        ),
        Check::new(
            "exact norms match single-mode measurements",
            worst_mismatch <= BASELINE_TOL,
            format!("largest relative mismatch {worst_mismatch:.3e}"),
        ),
    ];
    if !single.is_empty() {
        checks.push(Check::new(
            "single-mode multipliers attain equality",
            worst_equality <= BASELINE_TOL,
            format!("{} cases, largest |relative margin| {worst_equality:.3e}", single.len()),
        ));
    }

    let csv = write_csv(
        &BASELINE_HEADER,
        rows.iter().map(|r| {
            vec![
                r.trial.to_string(),
                r.single_mode.to_string(),
                fmt_f64(r.a),
                fmt_f64(r.b),
                fmt_f64(r.s),
                fmt_f64(r.alpha),
                fmt_f64(r.beta),
                fmt_f64(r.n_a),
                fmt_f64(r.n_s),
                fmt_f64(r.n_b),
                fmt_f64(r.bound),
                fmt_f64(r.relative_margin),
                fmt_f64(r.mismatch),
            ]
        }),
    )?;
    Ok(Outcome {
        command: Command::Baseline,
        files: vec![("baseline.json".into(), to_json(&rows)?), ("baseline.csv".into(), csv)],
        checks,
    })
}
