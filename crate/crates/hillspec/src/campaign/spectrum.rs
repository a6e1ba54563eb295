use hillspec_core::schrodinger::spectral_table;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Check, Command, Outcome};
use crate::config::CampaignConfig;
use crate::error::Result;
use crate::formats::{spectral_csv, to_json, FourierJson, SpectralRow};

/// Spectral table of one potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumEntry {
    pub potential: FourierJson,
    pub lambda0: f64,
    /// Leading sign of the κ expansion used for `r_kappa`.
    pub sign: f64,
    pub records: Vec<SpectralRow>,
}

/// Dirichlet and periodic spectra, `κ_n` and both residuals for every
/// configured potential. Writes `spectrum.json` and `spectrum_<i>.csv`.
pub fn run(config: &CampaignConfig) -> Result<Outcome> {
    let sc = &config.spectrum;
    let tables = sc
        .potentials
        .par_iter()
        .map(|p| {
            let q = p.build(config.seed)?;
            let table = spectral_table(&q, 1..=sc.n_max, sc.tol)?;
            Ok((q, table))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut files = Vec::new();
    let mut checks = Vec::new();
    let mut entries = Vec::new();
    for (i, (q, table)) in tables.iter().enumerate() {
        files.push((format!("spectrum_{i}.csv"), spectral_csv(table)?));
        // μ_n sits in [λ_n^-, λ_n^+]; near-tangent gap edges are only
        // resolved to a few digits, hence the relative allowance
        let worst = table
            .records
            .iter()
            .map(|r| {
                let slack = 1e-6 * r.mu.abs().max(1.0) + r.est_error;
                (r.lam_minus - r.mu).max(r.mu - r.lam_plus) / slack
            })
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::new(
            format!("potential {i}: Dirichlet eigenvalues inside the gaps"),
            worst <= 1.0,
            format!("worst excess {worst:.3} of the allowance, n <= {}", sc.n_max),
        ));
        let invalid: Vec<u32> = table.records.iter().filter(|r| !r.kappa_valid).map(|r| r.n).collect();
        checks.push(Check::new(
            format!("potential {i}: spectrum computed"),
            true,
            format!(
                "lambda0 = {:.6e}, kappa outside its analyticity region at n = {invalid:?}",
                table.lambda0
            ),
        ));
        entries.push(SpectrumEntry {
            potential: FourierJson::from(q),
            lambda0: table.lambda0,
            sign: table.sign,
            records: table.records.iter().map(SpectralRow::from).collect(),
        });
    }
    files.insert(0, ("spectrum.json".into(), to_json(&entries)?));
    Ok(Outcome {
        command: Command::Spectrum,
        files,
        checks,
    })
}
