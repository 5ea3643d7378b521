//! `dpc`: excitation, fitting, closed-loop campaigns, linearity test and
//! solver timing for the data-driven predictive controllers.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{Context, Outcome};
use crate::config::CampaignConfig;

#[derive(Debug, Parser)]
#[command(name = "dpc", version, about = "Data-driven predictive control toolkit")]
struct Cli {
    /// Campaign configuration (TOML). Built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the base seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "DPC_OUT_DIR")]
    out: Option<PathBuf>,
    /// Worker threads for episode batches (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Excite the plant and write the input/output record.
    Excite,
    /// Fit TPC, Single-ARX and DeePC data from the excitation record.
    Fit,
    /// Closed-loop episodes for every scenario and controller.
    Run,
    /// Open-loop superposition test of the plant.
    Linearity,
    /// Setup and warm-started solve times over a horizon grid.
    Bench,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(path) => CampaignConfig::load(path)?,
        None => CampaignConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let out = cli
        .out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("dpc-out"));
    let ctx = Context::new(cfg, out, cli.jobs)?;
    match cli.command {
        Command::Excite => commands::excite::run(&ctx),
        Command::Fit => commands::fit::run(&ctx),
        Command::Run => commands::run::run(&ctx),
        Command::Linearity => commands::linearity::run(&ctx),
        Command::Bench => commands::bench::run(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Diverged(names)) => {
            eprintln!("error: unexpected divergence in {}", names.join(", "));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
