//! Campaign runners. Each returns its artifacts in memory so that results
//! can be compared byte for byte before anything touches the disk; a
//! single writer then persists them.

pub mod baseline;
pub mod interp;
pub mod kappa;
pub mod residuals;
pub mod spectrum;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::cache::write_atomic;
use crate::config::CampaignConfig;
use crate::error::{ExitStatus, Result};

pub use baseline::run as run_baseline;
pub use interp::run as run_interp;
pub use kappa::run as run_kappa;
pub use residuals::run as run_residuals;
pub use spectrum::run as run_spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Kappa,
    Residuals,
    Interp,
    Baseline,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Kappa => "kappa",
            Command::Residuals => "residuals",
            Command::Interp => "interp",
            Command::Baseline => "baseline",
        }
    }
}

/// One verified property.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Files and verdicts of one campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_status(&self) -> ExitStatus {
        if self.passed() {
            ExitStatus::Pass
        } else {
            ExitStatus::PropertyViolation
        }
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    /// Plain-text report: one line per check, then the verdict.
    pub fn summary(&self) -> String {
        let mut out = format!("hillspec {}\n", self.command.name());
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag}  {}: {}", c.name, c.detail);
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(out, "{} checks, {failed} failed", self.checks.len());
        out
    }

    /// `summary_<command>.txt`, so campaigns can share a directory.
    pub fn summary_name(&self) -> String {
        format!("summary_{}.txt", self.command.name())
    }

    /// Writes every file plus the summary into `dir`.
    pub fn persist(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len() + 1);
        for (name, contents) in &self.files {
            written.push(write_atomic(dir, name, contents.as_bytes())?);
        }
        written.push(write_atomic(dir, &self.summary_name(), self.summary().as_bytes())?);
        Ok(written)
    }
}

pub fn run(command: Command, config: &CampaignConfig) -> Result<Outcome> {
    config.validate()?;
    match command {
        Command::Spectrum => run_spectrum(config),
        Command::Kappa => run_kappa(config),
        Command::Residuals => run_residuals(config),
        Command::Interp => run_interp(config),
        Command::Baseline => run_baseline(config),
    }
}

/// Independent seed for item `index` of random stream `stream`.
pub(crate) fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mix = |mut z: u64| {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    mix(base ^ mix(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ mix(index)))
}
