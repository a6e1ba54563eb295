use hillspec_core::fit::{weighted_sum, ResidualReport};
use hillspec_core::fourier::sample_ball;
use hillspec_core::schrodinger::{spectral_table, SpectralRecord, KAPPA_LEADING_SIGN};
use hillspec_core::SobolevIndex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, Check, Command, Outcome};
use crate::config::{CampaignConfig, ResidualConfig};
use crate::error::{HarnessError, Result};
use crate::formats::{fmt_f64, to_json, write_csv};

const STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSummary {
    pub seed: u64,
    /// `None` when the residuals sit below the floor.
    pub slope: Option<f64>,
    pub half_width: f64,
    pub points_used: usize,
    /// `Σ_{n_R < n ≤ n_max} n^{2(s+1)} r_n²`.
    pub weighted_sum: f64,
    /// The same sum truncated at the stability horizon.
    pub weighted_sum_short: f64,
    /// Smallest `n0` with `κ_n` valid for every `n ≥ n0`.
    pub valid_from: u32,
}

/// Decay statistics of one residual sequence over the seed ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSummary {
    pub worst_slope: Option<f64>,
    pub required_slope: f64,
    pub sup_weighted_sum: f64,
    pub tail_norm: f64,
    /// `M_R`, the largest `|r_n|` over `n ≤ n_R`.
    pub head_max: f64,
    /// `n_R^{s+3/2} M_R`.
    pub head_bound: f64,
    pub total_norm: f64,
    pub split_holds: bool,
    /// Largest relative change of the weighted sum between the two horizons.
    pub stability_change: f64,
    pub seeds: Vec<SeedSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevSummary {
    pub s: f64,
    pub kappa: SequenceSummary,
    pub midpoint: SequenceSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualsDocument {
    /// `σ` in `r_n = 2πn κ_n - σ⟨q, sin 2πnx⟩`.
    pub sign: f64,
    pub n_r: u32,
    pub n_max: u32,
    pub stability_n: u32,
    pub reports: Vec<SobolevSummary>,
}

pub const RESIDUALS_HEADER: [&str; 9] = ["s", "seed", "n", "mu", "kappa", "lam_minus", "lam_plus", "r_kappa", "r_mid"];

/// Residual decay over sharp samples of the `H^s` balls. Writes
/// `residuals.json` and `residuals.csv`.
pub fn run(config: &CampaignConfig) -> Result<Outcome> {
    let rc = &config.residuals;
    let seeds: Vec<u64> = (0..rc.seeds as u64).map(|i| derive_seed(config.seed, STREAM, i)).collect();
    let jobs: Vec<(f64, u64)> = rc.s_list.iter().flat_map(|&s| seeds.iter().map(move |&seed| (s, seed))).collect();
    let tables = jobs
        .par_iter()
        .map(|&(s, seed)| {
            let sob = SobolevIndex::new(s)?;
            let q = sample_ball(sob, rc.radius, rc.max_freq, rc.margin, seed)?;
            Ok(spectral_table(&q, 1..=rc.n_max, rc.tol)?.records)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv_rows = Vec::new();
    for (&(s, seed), records) in jobs.iter().zip(&tables) {
        for r in records {
            csv_rows.push(vec![
                fmt_f64(s),
                seed.to_string(),
                r.n.to_string(),
                fmt_f64(r.mu),
                fmt_f64(r.kappa),
                fmt_f64(r.lam_minus),
                fmt_f64(r.lam_plus),
                fmt_f64(r.r_kappa),
                fmt_f64(r.r_mid),
            ]);
        }
    }

    let n_r = rc.fit_from - 1;
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for (si, &s) in rc.s_list.iter().enumerate() {
        let block = &tables[si * seeds.len()..(si + 1) * seeds.len()];
        let kappa = summarize(rc, s, &seeds, block, |r| r.r_kappa)?;
        let midpoint = summarize(rc, s, &seeds, block, |r| r.r_mid)?;
        for (label, seq) in [("kappa", &kappa), ("midpoint", &midpoint)] {
            let slope_ok = seq.worst_slope.is_none_or(|w| w <= seq.required_slope);
            checks.push(Check::new(
                format!("s = {s}: {label} residual decay"),
                slope_ok,
                match seq.worst_slope {
                    Some(w) => format!(
                        "worst slope {w:.3} over {} seeds, required <= {:.3}",
                        seeds.len(),
                        seq.required_slope
                    ),
                    None => "below floor".into(),
                },
            ));
            checks.push(Check::new(
                format!("s = {s}: {label} weighted sum stable"),
                seq.stability_change <= rc.stability_tol,
                format!(
                    "relative change {:.3e} from n_max = {} to {}, sup sum {:.3e}",
                    seq.stability_change, rc.stability_n, rc.n_max, seq.sup_weighted_sum
                ),
            ));
            checks.push(Check::new(
                format!("s = {s}: {label} head/tail split"),
                seq.split_holds,
                format!(
                    "head bound {:.3e} (n_R = {n_r}), tail {:.3e}, total {:.3e}",
                    seq.head_bound, seq.tail_norm, seq.total_norm
                ),
            ));
        }
        reports.push(SobolevSummary { s, kappa, midpoint });
    }

    let doc = ResidualsDocument {
        sign: KAPPA_LEADING_SIGN,
        n_r,
        n_max: rc.n_max,
        stability_n: rc.stability_n,
        reports,
    };
    Ok(Outcome {
        command: Command::Residuals,
        files: vec![
            ("residuals.json".into(), to_json(&doc)?),
            ("residuals.csv".into(), write_csv(&RESIDUALS_HEADER, csv_rows)?),
        ],
        checks,
    })
}

fn summarize(
    rc: &ResidualConfig,
    s: f64,
    seeds: &[u64],
    tables: &[Vec<SpectralRecord>],
    pick: impl Fn(&SpectralRecord) -> f64,
) -> Result<SequenceSummary> {
    let n_r = rc.fit_from - 1;
    let sequences: Vec<(u64, Vec<(u32, f64)>)> = seeds
        .iter()
        .zip(tables)
        .map(|(&seed, recs)| (seed, recs.iter().map(|r| (r.n, pick(r).abs())).collect()))
        .collect();
    let report = ResidualReport::build(s, n_r, rc.floor, sequences).map_err(HarnessError::from)?;
    let mut stability_change: f64 = 0.0;
    let seeds = report
        .seeds
        .iter()
        .zip(tables)
        .map(|(x, recs)| {
            let short = weighted_sum(&x.residuals, s, n_r, rc.stability_n);
            if x.weighted_sum > 0.0 {
                stability_change = stability_change.max((x.weighted_sum - short) / x.weighted_sum);
            }
            let valid_from = recs.iter().filter(|r| !r.kappa_valid).map(|r| r.n + 1).max().unwrap_or(1);
            SeedSummary {
                seed: x.seed,
                slope: x.fit.slope,
                half_width: x.fit.half_width,
                points_used: x.fit.points_used,
                weighted_sum: x.weighted_sum,
                weighted_sum_short: short,
                valid_from,
            }
        })
        .collect();
    Ok(SequenceSummary {
        worst_slope: report.worst_slope,
        required_slope: -(s + 1.0) + rc.slope_slack,
        sup_weighted_sum: report.sup_weighted_sum,
        tail_norm: report.tail_norm(),
        head_max: report.head_max,
        head_bound: report.head_bound,
        total_norm: report.total_norm,
        split_holds: report.split_holds(),
        stability_change,
        seeds,
    })
}
