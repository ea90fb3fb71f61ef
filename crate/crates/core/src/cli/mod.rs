//! JSON-configured parameter sweeps, CSV output and gnuplot scripts, plus
//! the argument handling behind the `adiabus` binary.

mod config;
mod plot;
mod run;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{
    parse_config, parse_config_as, ExperimentConfig, ExperimentKind, GridPoint, ModelFamily, OutputConfig,
    ProtocolKind, SectorChoice,
};
pub use plot::{emit_plot_script, header_for, plot_script, PlotTemplate};
pub use run::{default_out_dir, resolve_workers, run_experiment, PointRecord, RunManifest, WORKERS_ENV};
pub use table::{fmt_g, Table};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config field `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("CSV header {found:?} does not match the template's {expected:?}")]
    SchemaMismatch { expected: String, found: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::SchemaMismatch { .. } => 2,
            CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "adiabus", version, about = "Adiabatic qubit transport along spin chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to `<prefix>-out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Parallel grid points; overrides ADIABUS_WORKERS and the config.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Seed for the eigensolver start vectors.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Data file produced by a run.
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, value_enum)]
    pub template: PlotTemplate,
    /// Directory for the script; defaults to the CSV's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest levels along the schedule.
    Spectrum(RunArgs),
    /// Sector gap over an (s, parameter) grid.
    GapScan(RunArgs),
    /// Ground-state fidelity against annealing time.
    FidelityCurve(RunArgs),
    /// Annealing time needed to reach the target fidelity.
    AnnealTime(RunArgs),
    /// Transport fidelity of single-qubit states.
    Transport(RunArgs),
    /// Pairing of the lowest levels across the two ground-manifold sectors.
    DegeneracyCheck(RunArgs),
    /// Write a gnuplot script for an existing CSV.
    Plot(PlotArgs),
}

fn run_command(kind: ExperimentKind, args: &RunArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let mut cfg = parse_config_as(&text, Some(kind))?;
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    let workers = resolve_workers(args.workers, &cfg)?;
    let out = args.out.clone().unwrap_or_else(|| default_out_dir(&cfg));
    let manifest = run_experiment(&cfg, &out, workers)?;
    let failed = manifest.failed_points();
    println!("{} points, {failed} failed; wrote {} files to {}", manifest.points.len(), manifest.files.len(), out.display());
    Ok(())
}

fn plot_command(args: &PlotArgs) -> Result<(), CliError> {
    let script = emit_plot_script(&args.csv, args.template)?;
    let dir = match &args.out {
        Some(d) => d.clone(),
        None => args.csv.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let stem = args.csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
    let path = dir.join(format!("{stem}_{}.gp", args.template.suffix()));
    std::fs::write(&path, script).map_err(|e| CliError::io(&path, e))?;
    println!("{}", path.display());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let (kind, args) = match &cli.command {
        Command::Plot(p) => return plot_command(p),
        Command::Spectrum(a) => (ExperimentKind::Spectrum, a),
        Command::GapScan(a) => (ExperimentKind::GapScan, a),
        Command::FidelityCurve(a) => (ExperimentKind::FidelityCurve, a),
        Command::AnnealTime(a) => (ExperimentKind::AnnealTime, a),
        Command::Transport(a) => (ExperimentKind::Transport, a),
        Command::DegeneracyCheck(a) => (ExperimentKind::DegeneracyCheck, a),
    };
    run_command(kind, args)
}

/// Entry point of the `adiabus` binary.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
