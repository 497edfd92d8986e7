//! Batch front-end for the heralded single-photon source simulator:
//! config ingestion, named presets, figure-ready CSV/JSON outputs.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

use clap::{Args, Parser, Subcommand};
use config::{Overrides, RawConfig, RunConfig};
use error::CliError;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "heraldsim",
    about = "Simulate and optimize heralded single-photon sources \
             (spectral/temporal filtering, multipair statistics)",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full heralding report (H, R, D_s, spectra) at one pump strength.
    Report(CommonArgs),
    /// H-versus-R trade-off curve over the pump-strength grid.
    Curve(CommonArgs),
    /// Bandwidth scan: optimal T, pump strength and rate per B.
    ScanB(CommonArgs),
    /// Prolate measurement-mode eigenvalues and samples.
    Modes(CommonArgs),
    /// Schmidt spectrum, degree-of-factorability K and purity.
    Schmidt(CommonArgs),
    /// Preset management.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum PresetsAction {
    /// List the built-in source presets.
    List,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Config file: flat section.key=value lines, or JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named source preset (see `presets list`).
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory for the generated files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output encoding for tabular data.
    #[arg(long, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    /// Quadrature nodes per frequency axis.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Frequency truncation half-width W, units sigma.
    #[arg(long)]
    pub window: Option<f64>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let preset = match &self.preset {
            Some(name) => Some(presets::find(name)?),
            None => None,
        };
        let raw = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::config(format!("cannot read config {}: {e}", path.display()))
                })?;
                RawConfig::parse(&text)?
            }
            None => RawConfig::default(),
        };
        let over = Overrides {
            out_dir: self.out.clone(),
            format: match &self.format {
                Some(f) => Some(config::OutputFormat::parse(f)?),
                None => None,
            },
            nodes: self.nodes,
            window: self.window,
        };
        config::resolve(preset, &raw, &over)
    }
}

/// Run a parsed command line; returns the lines to print on stdout.
pub fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let (cfg, paths) = match &cli.command {
        Command::Report(args) => {
            let cfg = args.resolve()?;
            let paths = commands::cmd_report(&cfg)?;
            (Some(cfg), paths)
        }
        Command::Curve(args) => {
            let cfg = args.resolve()?;
            let paths = commands::cmd_curve(&cfg)?;
            (Some(cfg), paths)
        }
        Command::ScanB(args) => {
            let cfg = args.resolve()?;
            let paths = commands::cmd_scan_b(&cfg)?;
            (Some(cfg), paths)
        }
        Command::Modes(args) => {
            let cfg = args.resolve()?;
            let paths = commands::cmd_modes(&cfg)?;
            (Some(cfg), paths)
        }
        Command::Schmidt(args) => {
            let cfg = args.resolve()?;
            let paths = commands::cmd_schmidt(&cfg)?;
            (Some(cfg), paths)
        }
        Command::Presets {
            action: PresetsAction::List,
        } => return Ok(vec![commands::presets_list()]),
    };
    let _ = cfg;
    Ok(paths
        .into_iter()
        .map(|p| format!("wrote {}", p.display()))
        .collect())
}
