//! `phasemetro`: bounds, Fisher scans, estimation experiments and
//! entanglement witnesses from the command line. All angles are radians.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phase_metrology::estimators::Domain;
use phase_metrology::spinspace::SpinAxis;
use serde::Serialize;
use thiserror::Error;

mod commands;
mod config;

use config::{parse_domain, Format, Overrides, PovmKind, ProbeKind, RunConfig, ThetaGrid, SCHEMA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("statistical failure: {0}")]
    Statistical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Statistical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "phasemetro", version, about)]
#[command(after_help = "Angles (--theta, --theta-grid, --domain) are in radians.")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Number of particles.
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Number of repeated measurements per estimate.
    #[arg(long, global = true)]
    m: Option<u64>,
    /// Number of Monte-Carlo repetitions.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// True phase in radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Phase grid START:STOP:POINTS in radians, both ends included.
    #[arg(long, global = true, value_name = "START:STOP:POINTS", allow_hyphen_values = true)]
    theta_grid: Option<ThetaGrid>,
    /// Estimation interval LO:HI in radians.
    #[arg(long, global = true, value_name = "LO:HI", value_parser = parse_domain, allow_hyphen_values = true)]
    domain: Option<Domain>,
    #[arg(long, global = true, value_enum)]
    probe: Option<ProbeKind>,
    /// Rotation axis: x, y, z or nx,ny,nz.
    #[arg(long, global = true, allow_hyphen_values = true)]
    axis: Option<SpinAxis>,
    #[arg(long, global = true, value_enum)]
    povm: Option<PovmKind>,
    /// Fisher information to test in `depth`; defaults to the probe's QFI.
    #[arg(long, global = true)]
    fisher: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Shot-noise, Heisenberg and quantum Cramér-Rao bounds.
    Bounds,
    /// Classical Fisher information over a phase grid.
    FisherScan,
    /// Quantum Fisher information and the optimal rotation axis.
    Qfi,
    /// Maximum-likelihood Monte-Carlo run.
    Mle,
    /// Bayesian posterior; with --m 0 the prior itself.
    Bayes,
    /// Method-of-moments Monte-Carlo run.
    Moments,
    /// Entanglement depth from a Fisher value.
    Depth,
    /// Spin-squeezing parameters along the mean spin.
    Squeeze,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::FisherScan => "fisher-scan",
            Command::Qfi => "qfi",
            Command::Mle => "mle",
            Command::Bayes => "bayes",
            Command::Moments => "moments",
            Command::Depth => "depth",
            Command::Squeeze => "squeeze",
        }
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    result: serde_json::Value,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(Overrides {
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
        n: cli.n,
        m: cli.m,
        trials: cli.trials,
        theta: cli.theta,
        theta_grid: cli.theta_grid,
        domain: cli.domain,
        probe: cli.probe,
        axis: cli.axis,
        povm: cli.povm,
        fisher_value: cli.fisher,
    })?;
    let command = cli.command.name();
    cfg.command = Some(command.to_string());
    cfg.validate(matches!(cli.command, Command::Bayes))?;

    let output = match cli.command {
        Command::Bounds => commands::bounds(&cfg),
        Command::FisherScan => commands::fisher_scan(&cfg),
        Command::Qfi => commands::qfi(&cfg),
        Command::Mle => commands::mle(&cfg),
        Command::Bayes => commands::bayes(&cfg),
        Command::Moments => commands::moments(&cfg),
        Command::Depth => commands::depth(&cfg),
        Command::Squeeze => commands::squeeze(&cfg),
    }?;

    let text = match cfg.format {
        Format::Csv => output.csv,
        Format::Json => {
            let report = JsonReport {
                schema: SCHEMA,
                command,
                config: &cfg,
                result: output.result,
            };
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("phasemetro: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
