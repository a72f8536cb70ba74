//! `syk-sim`: reproducible experiment runner.
//!
//! Every subcommand reads one config file (TOML, JSON, or a previous run's
//! `manifest.json`), applies flag overrides, writes its data files into the
//! output directory and finishes with a manifest listing the config, seeds
//! and a SHA-256 of every file.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Engine, RunConfig};
use output::OutputDir;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Convergence(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<syk_sim::Error> for CliError {
    fn from(e: syk_sim::Error) -> Self {
        use syk_sim::Error as E;
        let msg = e.to_string();
        match e {
            E::Parameter(_) | E::Domain(_) | E::ResourceCap { .. } | E::Dimension(_) => {
                CliError::Config(msg)
            }
            E::DegenerateSample { .. } | E::NotHermitian(_) | E::NotUnitary(_) => {
                CliError::Numerical(msg)
            }
            E::Convergence { .. } => CliError::Convergence(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "syk-sim",
    version,
    about = "Generalized SYK model simulation runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file (.toml, .json, or a run manifest).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default `out/<command>`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Time-evolution engine; overrides the config.
    #[arg(long, global = true, value_enum)]
    engine: Option<Engine>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Draw coupling tensors and write them per sample.
    Couplings,
    /// Exact vs product-formula fidelity over (ln tau, log10 n).
    FidelitySurface,
    /// Boson pair correlators over the (beta, mu) grid.
    Correlation,
    /// Late-time plateau against system size.
    Scaling,
    /// Compile every term to one- and two-body gates with resource counts.
    Compile,
    /// Optimise a shaped pulse for a ZZ rotation.
    Grape,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Couplings => "couplings",
            Command::FidelitySurface => "fidelity-surface",
            Command::Correlation => "correlation",
            Command::Scaling => "scaling",
            Command::Compile => "compile",
            Command::Grape => "grape",
        }
    }
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    let name = cli.command.name();
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p, name)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    if let Some(e) = cli.engine {
        cfg.engine = e;
    }
    cfg.validate()?;
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let root = cli.out.unwrap_or_else(|| PathBuf::from("out").join(name));
    let mut out = OutputDir::create(&root)?;
    let outcome = match cli.command {
        Command::Couplings => commands::couplings(&cfg, &mut out),
        Command::FidelitySurface => commands::fidelity(&cfg, &mut out),
        Command::Correlation => commands::correlation(&cfg, &mut out),
        Command::Scaling => commands::scaling(&cfg, &mut out),
        Command::Compile => commands::compile(&cfg, &mut out),
        Command::Grape => commands::grape(&cfg, &mut out),
    }?;
    let manifest = out.finish(name, &cfg, outcome.details)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(manifest) => {
            println!("wrote {}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("syk-sim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
