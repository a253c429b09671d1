//! Single-binary front end for the parity toolkit.
//!
//! Subcommands share a flat TOML config; flags override config keys. The
//! default output directory comes from `--out`, then the config, then the
//! `QPARITY_OUTPUT_DIR` environment variable, then the current directory.
//! Exit codes: 0 success, 2 config/validation error, 3 data/numeric error.

// Validation uses `!(x > 0.0)` so NaN inputs fail the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cmd_antenna;
mod cmd_dispersion;
mod cmd_parity;
mod cmd_qp;
mod config;
mod error;
mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::Config;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "qparity", version, about = "Charge-parity switching toolkit")]
struct Cli {
    /// TOML config file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed; recorded in every report.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Charge-dispersion curve and parity splitting of a transmon.
    Dispersion(cmd_dispersion::DispersionArgs),
    /// Parity trace simulation or ingestion, PSD estimate, telegraph fit.
    Parity(cmd_parity::ParityArgs),
    /// Quasiparticle recovery dynamics and trapping-rate extraction.
    Qp(cmd_qp::QpArgs),
    /// Antenna coupling efficiency and blackbody parity-rate model.
    Antenna(cmd_antenna::AntennaArgs),
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(1);
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os("QPARITY_OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    match &cli.command {
        Command::Dispersion(args) => cmd_dispersion::run(args, &config, seed, &out_dir),
        Command::Parity(args) => cmd_parity::run(args, &config, seed, &out_dir),
        Command::Qp(args) => cmd_qp::run(args, &config, seed, &out_dir),
        Command::Antenna(args) => cmd_antenna::run(args, &config, seed, &out_dir),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(&cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
