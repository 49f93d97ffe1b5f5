//! `hfio`: runs experiment configurations and writes their artifacts.
//!
//! Exit status: 0 when every verdict passes, 2 when some verdict fails,
//! 1 on an execution error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use hfio_core::experiments::{run_config, ExperimentConfig, RunSummary};

#[derive(Parser)]
#[command(name = "hfio", version, about = "Experiments with FIO-adapted Hardy spaces on periodic grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV files and summary.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Lebesgue, Sobolev, FIO-adapted and cap-sum norms of a field.
    Norm(Io),
    /// Space-time decoupling and square-function norms at one level.
    Decouple(Io),
    /// Decoupling ladder across levels with slope fits.
    Wolff(Io),
    /// FIO-norm invariance against Lebesgue-norm growth under the half-wave group.
    Wave(Io),
    /// Picard iteration for the cubic wave equation on a torus.
    Nlw(Io),
    /// Slope laws of the focusing and unit-scale packet families.
    Sharpness(Io),
    /// Rank conditions of a phase function.
    Curvature(Io),
    /// Support and weighted-norm validation of atoms.
    Atom(Io),
    /// Every experiment of the configuration, whatever its kind.
    Run(Io),
}

impl Command {
    fn split(&self) -> (Option<&'static str>, &Io) {
        match self {
            Command::Norm(io) => (Some("norms"), io),
            Command::Decouple(io) => (Some("decouple"), io),
            Command::Wolff(io) => (Some("wolff"), io),
            Command::Wave(io) => (Some("wave"), io),
            Command::Nlw(io) => (Some("nlw"), io),
            Command::Sharpness(io) => (Some("sharpness"), io),
            Command::Curvature(io) => (Some("curvature"), io),
            Command::Atom(io) => (Some("atoms"), io),
            Command::Run(io) => (None, io),
        }
    }
}

fn execute(cmd: &Command) -> anyhow::Result<RunSummary> {
    let (kind, io) = cmd.split();
    let cfg = ExperimentConfig::from_path(&io.config)?;
    if let Some(kind) = kind {
        if let Some(e) = cfg.experiments.iter().find(|e| e.kind != kind) {
            bail!("configuration contains a '{}' experiment; this subcommand runs only '{kind}' (use `hfio run` for mixed files)", e.kind);
        }
    }
    let summary = run_config(&cfg, &io.out).with_context(|| format!("running {}", io.config.display()))?;
    Ok(summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(s) => {
            for e in &s.experiments {
                println!("{} {} {}", if e.pass { "PASS" } else { "FAIL" }, e.kind, e.name);
            }
            if s.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
