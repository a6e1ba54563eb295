use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hillspec::cache::output_dir;
use hillspec::{run, CampaignConfig, Command, ExitStatus, HarnessError};

/// Spectral campaigns for Hill operators and interpolation checks.
///
/// Exit status: 0 all checks pass, 1 a property check failed, 2 bad
/// configuration, 3 solver or output failure.
#[derive(Debug, Parser)]
#[command(name = "hillspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// JSON configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, overriding the cache location.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed, overriding the configured one.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Dirichlet and periodic spectra, κ_n and residuals per potential.
    Spectrum,
    /// Floquet exponents and the analyticity check on a complex circle.
    Kappa,
    /// Residual decay over sampled Sobolev balls.
    Residuals,
    /// Three-lines checks for the built-in analytic maps.
    Interp,
    /// Linear baseline with diagonal multipliers.
    Baseline,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Spectrum => Command::Spectrum,
            Sub::Kappa => Command::Kappa,
            Sub::Residuals => Command::Residuals,
            Sub::Interp => Command::Interp,
            Sub::Baseline => Command::Baseline,
        }
    }
}

fn execute(cli: &Cli) -> Result<ExitStatus, HarnessError> {
    let mut config = match &cli.config {
        Some(path) => CampaignConfig::load(path)?,
        None => CampaignConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let outcome = pool.install(|| run(cli.command.into(), &config))?;
    let dir = output_dir(&config, cli.out.as_deref());
    outcome.persist(&dir)?;
    print!("{}", outcome.summary());
    println!("results in {}", dir.display());
    Ok(outcome.exit_status())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = execute(&cli).unwrap_or_else(|e| {
        eprintln!("hillspec: {e}");
        e.exit_status()
    });
    ExitCode::from(status as u8)
}
