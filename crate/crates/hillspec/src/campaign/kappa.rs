use hillspec_core::schrodinger::{analytic_continuation_check, dirichlet_spectrum, floquet_exponent, ContinuationReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Check, Command, Outcome};
use crate::config::CampaignConfig;
use crate::error::Result;
use crate::formats::{fmt_f64, to_json, write_csv, FourierJson};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaRow {
    pub n: u32,
    pub mu: f64,
    pub kappa: f64,
    pub valid: bool,
    /// `|(-1)^n y1(1, μ_n) - 1|`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationSummary {
    pub rho: f64,
    pub direction: FourierJson,
    /// Smallest `n_R` with every circle sample valid above it.
    pub n_r: u32,
    /// Largest Cauchy mean-value defect over `n > n_R`.
    pub max_defect: f64,
    /// Largest `|κ_n(q + w d) - κ_n(q)|` over the circle and `n > n_R`;
    /// shows how far the samples move against the size of the defect.
    pub max_spread: f64,
    /// `(n, defect, all samples valid)`.
    pub defects: Vec<(u32, f64, bool)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaEntry {
    pub potential: FourierJson,
    pub rows: Vec<KappaRow>,
    pub continuation: Option<ContinuationSummary>,
}

pub const KAPPA_HEADER: [&str; 5] = ["n", "mu", "kappa", "valid", "distance"];
pub const CONTINUATION_HEADER: [&str; 4] = ["n", "defect", "valid", "n_r"];

/// `κ_n` of every configured potential and, for `rho > 0`, the
/// analyticity check on the circle `q + ρ e^{iθ} d`. Writes `kappa.json`,
/// `kappa_<i>.csv` and `continuation_<i>.csv`.
pub fn run(config: &CampaignConfig) -> Result<Outcome> {
    let kc = &config.kappa;
    let direction = kc.direction.build(config.seed)?;
    let results = kc
        .potentials
        .par_iter()
        .map(|p| {
            let q = p.build(config.seed)?;
            let rows = dirichlet_spectrum(&q, kc.n_max, kc.tol)?
                .iter()
                .map(|mu| {
                    let fl = floquet_exponent(&q, mu, kc.tol)?;
                    Ok(KappaRow {
                        n: mu.n,
                        mu: mu.mu.re,
                        kappa: fl.kappa.re,
                        valid: fl.valid,
                        distance: fl.distance,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let cont = if kc.rho > 0.0 {
                Some(analytic_continuation_check(&q, &direction, kc.rho, 1..=kc.n_max, kc.tol)?)
            } else {
                None
            };
            Ok((q, rows, cont))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut files = Vec::new();
    let mut checks = Vec::new();
    let mut entries = Vec::new();
    for (i, (q, rows, cont)) in results.into_iter().enumerate() {
        files.push((
            format!("kappa_{i}.csv"),
            write_csv(
                &KAPPA_HEADER,
                rows.iter().map(|r| {
                    vec![
                        r.n.to_string(),
                        fmt_f64(r.mu),
                        fmt_f64(r.kappa),
                        r.valid.to_string(),
                        fmt_f64(r.distance),
                    ]
                }),
            )?,
        ));
        let continuation = cont.map(|report| summarize(i, &report, kc.defect_tol, kc.n_max, &mut checks, &direction));
        if let Some(c) = &continuation {
            files.push((
                format!("continuation_{i}.csv"),
                write_csv(
                    &CONTINUATION_HEADER,
                    c.defects
                        .iter()
                        .map(|&(n, d, v)| vec![n.to_string(), fmt_f64(d), v.to_string(), c.n_r.to_string()]),
                )?,
            ));
        }
        entries.push(KappaEntry {
            potential: FourierJson::from(&q),
            rows,
            continuation,
        });
    }
    files.insert(0, ("kappa.json".into(), to_json(&entries)?));
    Ok(Outcome {
        command: Command::Kappa,
        files,
        checks,
    })
}

fn summarize(
    i: usize,
    report: &ContinuationReport,
    defect_tol: f64,
    n_max: u32,
    checks: &mut Vec<Check>,
    direction: &hillspec_core::FourierFunction,
) -> ContinuationSummary {
    let max_defect = report.max_defect_above(report.n_r);
    let max_spread = report
        .entries
        .iter()
        .filter(|e| e.n > report.n_r)
        .flat_map(|e| e.samples.iter().map(move |s| (s - e.center).norm()))
        .fold(0.0, f64::max);
    checks.push(Check::new(
        format!("potential {i}: kappa valid on the circle above n_R"),
        report.n_r < n_max,
        format!("n_R = {} of n <= {n_max}, rho = {}", report.n_r, report.rho),
    ));
    checks.push(Check::new(
        format!("potential {i}: mean-value defect above n_R"),
        max_defect <= defect_tol,
        format!("max defect {max_defect:.3e} (allowed {defect_tol:.1e}), samples move kappa by up to {max_spread:.3e}"),
    ));
    ContinuationSummary {
        rho: report.rho,
        direction: FourierJson::from(direction),
        n_r: report.n_r,
        max_defect,
        max_spread,
        defects: report.entries.iter().map(|e| (e.n, e.defect, e.all_valid())).collect(),
    }
}
