use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::config::ExperimentKind;
use super::table::fmt_g;
use super::CliError;

pub const ANNEAL_TIME_HEADER: &str = "N,param,tau_star,fidelity,status";
pub const GAP_SCAN_HEADER: &str = "s,param,gap";
pub const FIDELITY_CURVE_HEADER: &str = "tau,fidelity";
pub const TRANSPORT_HEADER: &str = "bx_in,by_in,bz_in,tau,bx_out,by_out,bz_out,qubit_fidelity";
pub const DEGENERACY_HEADER: &str = "level,energy,pair_split";
pub const SPECTRUM_HEADER: &str = "N,param,s,level,energy";

pub fn header_for(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Spectrum => SPECTRUM_HEADER,
        ExperimentKind::GapScan => GAP_SCAN_HEADER,
        ExperimentKind::FidelityCurve => FIDELITY_CURVE_HEADER,
        ExperimentKind::AnnealTime => ANNEAL_TIME_HEADER,
        ExperimentKind::Transport => TRANSPORT_HEADER,
        ExperimentKind::DegeneracyCheck => DEGENERACY_HEADER,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotTemplate {
    /// Annealing time against the swept parameter, one curve per N.
    AnnealTime,
    /// Annealing time against N on log-log axes, one curve per parameter.
    TimeScaling,
    /// Gap over `(param, s)` with a logarithmic color scale.
    GapMap,
    /// Fidelity against annealing time.
    FidelityCurve,
}

impl PlotTemplate {
    pub fn header(self) -> &'static str {
        match self {
            PlotTemplate::AnnealTime | PlotTemplate::TimeScaling => ANNEAL_TIME_HEADER,
            PlotTemplate::GapMap => GAP_SCAN_HEADER,
            PlotTemplate::FidelityCurve => FIDELITY_CURVE_HEADER,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            PlotTemplate::AnnealTime => "anneal_time",
            PlotTemplate::TimeScaling => "time_scaling",
            PlotTemplate::GapMap => "gap_map",
            PlotTemplate::FidelityCurve => "fidelity",
        }
    }
}

fn distinct(text: &str, column: usize) -> Vec<f64> {
    let set: BTreeSet<u64> = text
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').nth(column)?.parse::<f64>().ok())
        .map(f64::to_bits)
        .collect();
    let mut v: Vec<f64> = set.into_iter().map(f64::from_bits).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Gnuplot script for `csv` (its text already loaded). The data file is
/// referenced by `name`, relative to the directory gnuplot runs in.
pub fn plot_script(name: &str, text: &str, template: PlotTemplate) -> Result<String, CliError> {
    let found = text.lines().next().unwrap_or("").trim();
    if found != template.header() {
        return Err(CliError::SchemaMismatch { expected: template.header().into(), found: found.into() });
    }
    let stem = name.strip_suffix(".csv").unwrap_or(name);
    let mut s = String::new();
    let w = &mut s;
    writeln!(w, "set datafile separator ','").unwrap();
    writeln!(w, "set terminal pngcairo size 900,640").unwrap();
    writeln!(w, "set output '{stem}_{}.png'", template.suffix()).unwrap();
    match template {
        PlotTemplate::AnnealTime => {
            writeln!(w, "set xlabel 'param'\nset ylabel 'tau*'\nset key top left").unwrap();
            let series: Vec<String> = distinct(text, 0)
                .iter()
                .map(|n| {
                    let n = fmt_g(*n);
                    format!("'{name}' skip 1 using ($1=={n} ? $2 : 1/0):3 with linespoints title 'N={n}'")
                })
                .collect();
            writeln!(w, "plot {}", series.join(", \\\n     ")).unwrap();
        }
        PlotTemplate::TimeScaling => {
            writeln!(w, "set logscale xy\nset xlabel 'N'\nset ylabel 'tau*'\nset key top left").unwrap();
            let series: Vec<String> = distinct(text, 1)
                .iter()
                .map(|p| {
                    let p = fmt_g(*p);
                    format!("'{name}' skip 1 using ($2=={p} ? $1 : 1/0):3 with linespoints title 'param={p}'")
                })
                .collect();
            writeln!(w, "plot {}", series.join(", \\\n     ")).unwrap();
        }
        PlotTemplate::GapMap => {
            writeln!(w, "set logscale cb\nset xlabel 'param'\nset ylabel 's'\nset cblabel 'gap'").unwrap();
            writeln!(w, "set palette rgbformulae 33,13,10").unwrap();
            writeln!(w, "plot '{name}' skip 1 using 2:1:($3 > 0 ? $3 : 1/0) with image notitle").unwrap();
        }
        PlotTemplate::FidelityCurve => {
            writeln!(w, "set logscale x\nset xlabel 'tau'\nset ylabel 'F'\nset yrange [0:1.05]").unwrap();
            writeln!(w, "plot '{name}' skip 1 using 1:2 with linespoints notitle").unwrap();
        }
    }
    Ok(s)
}

/// Read `csv` and build the script for `template`.
pub fn emit_plot_script(csv: &Path, template: PlotTemplate) -> Result<String, CliError> {
    let text = std::fs::read_to_string(csv).map_err(|e| CliError::io(csv, e))?;
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    plot_script(&name, &text, template)
}
