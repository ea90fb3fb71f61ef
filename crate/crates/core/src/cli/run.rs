use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind, GridPoint};
use super::plot::{header_for, plot_script, PlotTemplate};
use super::table::{fmt_g, opt_g, Table};
use super::CliError;
use crate::anneal::{
    find_anneal_time, gap_cell, ground_manifold_sectors, AnnealProblem, AnnealTimeResult, SearchStatus,
    TransportConfig, TransportResult, TransportSetup,
};
use crate::basis::enumerate_sector;
use crate::error::{Error, Result as CoreResult};
use crate::solver::{build_sector_operator, lowest_eigenpairs};

pub const WORKERS_ENV: &str = "ADIABUS_WORKERS";

/// Worker count: explicit request, then `ADIABUS_WORKERS`, then the
/// config, then the number of available cores.
pub fn resolve_workers(requested: Option<usize>, cfg: &ExperimentConfig) -> Result<usize, CliError> {
    let env = match std::env::var(WORKERS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().ok().filter(|&w| w > 0).ok_or_else(|| CliError::Validation {
            field: WORKERS_ENV.into(),
            message: format!("{v:?} is not a positive integer"),
        })?),
        Err(_) => None,
    };
    let w = requested
        .or(env)
        .or(cfg.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if w == 0 {
        return Err(CliError::Validation { field: "workers".into(), message: "must be positive".into() });
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub n_spins: usize,
    pub param: Option<f64>,
    pub status: String,
    pub detail: Option<String>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub workers: usize,
    pub config: serde_json::Value,
    pub points: Vec<PointRecord>,
    /// Written files, relative to the output directory.
    pub files: Vec<String>,
    pub wall_seconds: f64,
}

impl RunManifest {
    pub fn failed_points(&self) -> usize {
        self.points.iter().filter(|p| !matches!(p.status.as_str(), "ok" | "reached" | "not-reached")).count()
    }
}

#[derive(Debug, Clone)]
enum PointData {
    AnnealTime(AnnealTimeResult),
    Cells(Vec<Option<f64>>),
    Transport(Vec<Option<TransportResult>>),
    Spectrum(Vec<Option<Vec<f64>>>),
    Levels(Vec<f64>),
}

#[derive(Debug, Clone)]
struct PointOutcome {
    data: Option<PointData>,
    status: String,
    detail: Option<String>,
    wall_seconds: f64,
}

/// Collect per-cell results, remembering the first failure.
struct Cells<T> {
    values: Vec<Option<T>>,
    first_error: Option<Error>,
}

impl<T> Cells<T> {
    fn collect(it: impl Iterator<Item = CoreResult<T>>) -> Self {
        let mut first_error = None;
        let values = it
            .map(|r| match r {
                Ok(v) => Some(v),
                Err(e) => {
                    first_error.get_or_insert(e);
                    None
                }
            })
            .collect();
        Cells { values, first_error }
    }

    fn status(&self) -> (String, Option<String>) {
        match &self.first_error {
            None => ("ok".into(), None),
            Some(e) if self.values.iter().all(Option::is_none) => (e.kind().into(), Some(e.to_string())),
            Some(e) => ("partial".into(), Some(e.to_string())),
        }
    }
}

fn run_point(cfg: &ExperimentConfig, point: GridPoint) -> CoreResult<(PointData, String, Option<String>)> {
    let p = cfg.build_protocol(point)?;
    let anneal = cfg.anneal_config();
    match cfg.experiment {
        ExperimentKind::AnnealTime => {
            let prob = AnnealProblem::new(&p, cfg.sector_for(&p), &anneal)?;
            let r = find_anneal_time(&prob, &cfg.search)?;
            let status = match r.status {
                SearchStatus::Reached => "reached",
                SearchStatus::NotReached { .. } => "not-reached",
            };
            Ok((PointData::AnnealTime(r), status.into(), None))
        }
        ExperimentKind::GapScan => {
            let sector = Some(cfg.sector_for(&p));
            let cells = Cells::collect(cfg.s.iter().map(|&s| gap_cell(&p, s, sector, &anneal.eigen)));
            let (status, detail) = cells.status();
            Ok((PointData::Cells(cells.values), status, detail))
        }
        ExperimentKind::FidelityCurve => {
            let prob = AnnealProblem::new(&p, cfg.sector_for(&p), &anneal)?;
            let cells = Cells::collect(cfg.tau.iter().map(|&t| prob.fidelity(t)));
            let (status, detail) = cells.status();
            Ok((PointData::Cells(cells.values), status, detail))
        }
        ExperimentKind::Transport => {
            let tcfg = TransportConfig { anneal, space: cfg.transport_space, sector_fidelities: false };
            let setup = TransportSetup::new(&p, &tcfg)?;
            let runs = cfg.bloch.iter().flat_map(|b| cfg.tau.iter().map(move |&t| (b, t)));
            let cells = Cells::collect(runs.map(|(b, t)| setup.run(b, t)));
            let (status, detail) = cells.status();
            Ok((PointData::Transport(cells.values), status, detail))
        }
        ExperimentKind::Spectrum => {
            let basis = Arc::new(enumerate_sector(cfg.sector_for(&p))?);
            let m = cfg.levels.min(basis.dim());
            let cells = Cells::collect(cfg.s.iter().map(|&s| {
                let op = build_sector_operator(&p.evaluate(s), &basis)?;
                Ok(lowest_eigenpairs(&op, m, &anneal.eigen)?.eigenvalues)
            }));
            let (status, detail) = cells.status();
            Ok((PointData::Spectrum(cells.values), status, detail))
        }
        ExperimentKind::DegeneracyCheck => {
            let model = p.evaluate(cfg.s[0]);
            let (a, b) = ground_manifold_sectors(&p)?;
            let mut levels = Vec::new();
            for spec in [a, b] {
                let basis = Arc::new(enumerate_sector(spec)?);
                let op = build_sector_operator(&model, &basis)?;
                levels.extend(lowest_eigenpairs(&op, cfg.levels.min(basis.dim()), &anneal.eigen)?.eigenvalues);
            }
            levels.sort_by(f64::total_cmp);
            levels.truncate(cfg.levels);
            Ok((PointData::Levels(levels), "ok".into(), None))
        }
    }
}

fn timed_point(cfg: &ExperimentConfig, point: GridPoint) -> PointOutcome {
    let start = Instant::now();
    let result = run_point(cfg, point);
    let wall_seconds = start.elapsed().as_secs_f64();
    match result {
        Ok((data, status, detail)) => PointOutcome { data: Some(data), status, detail, wall_seconds },
        Err(e) => {
            log::warn!("point N={} param={:?} failed: {e}", point.n_spins, point.param);
            PointOutcome { data: None, status: e.kind().into(), detail: Some(e.to_string()), wall_seconds }
        }
    }
}

fn param_cell(point: &GridPoint) -> String {
    opt_g(point.param)
}

fn point_file(cfg: &ExperimentConfig, point: &GridPoint) -> String {
    match point.param {
        Some(x) => format!("{}_N{}_{}{}.csv", cfg.prefix(), point.n_spins, cfg.model.param_key(), fmt_g(x)),
        None => format!("{}.csv", cfg.prefix()),
    }
}

/// Data files in write order, as `(name, contents)`.
fn assemble(cfg: &ExperimentConfig, grid: &[GridPoint], outcomes: &[PointOutcome]) -> Vec<(String, String)> {
    let header = header_for(cfg.experiment);
    let mut files = Vec::new();
    match cfg.experiment {
        ExperimentKind::AnnealTime => {
            let mut t = Table::new(header);
            for (pt, o) in grid.iter().zip(outcomes) {
                let (tau, f) = match &o.data {
                    Some(PointData::AnnealTime(r)) => (opt_g(r.tau_star), opt_g(r.fidelity_at_tau_star)),
                    _ => (String::new(), String::new()),
                };
                t.row(&[pt.n_spins.to_string(), param_cell(pt), tau, f, o.status.clone()]);
            }
            files.push((format!("{}.csv", cfg.prefix()), t.into_text()));
        }
        ExperimentKind::Spectrum => {
            let mut t = Table::new(header);
            for (pt, o) in grid.iter().zip(outcomes) {
                let Some(PointData::Spectrum(rows)) = &o.data else { continue };
                for (s, levels) in cfg.s.iter().zip(rows) {
                    for (k, e) in levels.iter().flatten().enumerate() {
                        t.row(&[pt.n_spins.to_string(), param_cell(pt), fmt_g(*s), k.to_string(), fmt_g(*e)]);
                    }
                }
            }
            files.push((format!("{}.csv", cfg.prefix()), t.into_text()));
        }
        ExperimentKind::GapScan => {
            let mut ns: Vec<usize> = grid.iter().map(|p| p.n_spins).collect();
            ns.dedup();
            for n in ns {
                let mut t = Table::new(header);
                let cols: Vec<(&GridPoint, &PointOutcome)> =
                    grid.iter().zip(outcomes).filter(|(p, _)| p.n_spins == n).collect();
                for (row, s) in cfg.s.iter().enumerate() {
                    for (pt, o) in &cols {
                        let gap = match &o.data {
                            Some(PointData::Cells(v)) => v[row],
                            _ => None,
                        };
                        t.row(&[fmt_g(*s), param_cell(pt), opt_g(gap)]);
                    }
                }
                let name = match grid[0].param {
                    Some(_) => format!("{}_N{n}.csv", cfg.prefix()),
                    None => format!("{}.csv", cfg.prefix()),
                };
                files.push((name, t.into_text()));
            }
        }
        ExperimentKind::FidelityCurve => {
            for (pt, o) in grid.iter().zip(outcomes) {
                let mut t = Table::new(header);
                for (k, tau) in cfg.tau.iter().enumerate() {
                    let f = match &o.data {
                        Some(PointData::Cells(v)) => v[k],
                        _ => None,
                    };
                    t.row(&[fmt_g(*tau), opt_g(f)]);
                }
                files.push((point_file(cfg, pt), t.into_text()));
            }
        }
        ExperimentKind::Transport => {
            for (pt, o) in grid.iter().zip(outcomes) {
                let mut t = Table::new(header);
                let mut k = 0;
                for b in &cfg.bloch {
                    for tau in &cfg.tau {
                        let r = match &o.data {
                            Some(PointData::Transport(v)) => v[k].as_ref(),
                            _ => None,
                        };
                        k += 1;
                        let out = |f: fn(&TransportResult) -> f64| opt_g(r.map(f));
                        t.row(&[
                            fmt_g(b.x),
                            fmt_g(b.y),
                            fmt_g(b.z),
                            fmt_g(*tau),
                            out(|r| r.bloch_out.x),
                            out(|r| r.bloch_out.y),
                            out(|r| r.bloch_out.z),
                            out(|r| r.qubit_fidelity),
                        ]);
                    }
                }
                files.push((point_file(cfg, pt), t.into_text()));
            }
        }
        ExperimentKind::DegeneracyCheck => {
            for (pt, o) in grid.iter().zip(outcomes) {
                let mut t = Table::new(header);
                if let Some(PointData::Levels(levels)) = &o.data {
                    for (k, e) in levels.iter().enumerate() {
                        let split = levels.get(k ^ 1).map(|p| (p - e).abs());
                        t.row(&[k.to_string(), fmt_g(*e), opt_g(split)]);
                    }
                }
                files.push((point_file(cfg, pt), t.into_text()));
            }
        }
    }
    files
}

fn plots_for(cfg: &ExperimentConfig, files: &[(String, String)]) -> Result<Vec<(String, String)>, CliError> {
    let templates: &[PlotTemplate] = match cfg.experiment {
        ExperimentKind::AnnealTime => &[PlotTemplate::AnnealTime, PlotTemplate::TimeScaling],
        ExperimentKind::GapScan => &[PlotTemplate::GapMap],
        ExperimentKind::FidelityCurve => &[PlotTemplate::FidelityCurve],
        _ => &[],
    };
    let mut out = Vec::new();
    for (name, text) in files {
        for &t in templates {
            let stem = name.strip_suffix(".csv").unwrap_or(name);
            out.push((format!("{stem}_{}.gp", t.suffix()), plot_script(name, text, t)?));
        }
    }
    Ok(out)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
}

/// Run every grid point on `workers` threads and write the data files,
/// plot scripts and manifest into `out_dir`. Per-point failures are
/// recorded in the manifest; only I/O problems return an error.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path, workers: usize) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let grid = cfg.grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Validation { field: "workers".into(), message: e.to_string() })?;
    log::info!("{} points on {workers} workers", grid.len());
    let outcomes: Vec<PointOutcome> = pool.install(|| grid.par_iter().map(|&pt| timed_point(cfg, pt)).collect());

    let data = assemble(cfg, &grid, &outcomes);
    let plots = if cfg.output.plots { plots_for(cfg, &data)? } else { Vec::new() };
    let mut files = Vec::new();
    for (name, text) in data.iter().chain(&plots) {
        write(out_dir, name, text)?;
        files.push(name.clone());
    }

    let points = grid
        .iter()
        .zip(outcomes)
        .enumerate()
        .map(|(index, (pt, o))| PointRecord {
            index,
            n_spins: pt.n_spins,
            param: pt.param,
            status: o.status,
            detail: o.detail,
            wall_seconds: o.wall_seconds,
        })
        .collect();
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: cfg.experiment.name().into(),
        workers,
        config: cfg.to_json(),
        points,
        files,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(out_dir, &cfg.output.manifest, &text)?;
    Ok(manifest)
}

/// Output directory default: `./<prefix>-out`.
pub fn default_out_dir(cfg: &ExperimentConfig) -> PathBuf {
    PathBuf::from(format!("{}-out", cfg.prefix()))
}
