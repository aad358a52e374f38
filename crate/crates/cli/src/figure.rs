//! Plot data for the standard figures. Each curve goes to its own CSV file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qkdkr_core::bounds::{lemma_delta_bound, wilde_conjecture_curve, winter_delta_bound, LEMMA_Q_MAX};
use qkdkr_core::keyrate::{key_rate, noise_tolerance, BoundSelector, ChannelFamily, Mode, ProtocolConfig};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::grid::{Grid, GridSpec};
use crate::output::{num, write_csv, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    /// Depolarizing rates for D = 2..8.
    Fig1,
    /// Depolarizing rates for D = 10, 20, ..., 110, full X measurement.
    Fig2Full,
    /// As fig2-full with the two-outcome X measurement.
    Fig2Partial,
    /// Qubit depolarizing rate, Winter bound against the qubit lemma.
    Fig3,
    /// The three Δ bounds for qubit depolarizing noise.
    Fig4,
    /// Amplitude damping rates for D = 4, 8, 12, full X measurement.
    AmpdampFull,
    /// As ampdamp-full with the two-outcome X measurement.
    AmpdampPartial,
}

impl FigureName {
    pub fn name(self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2Full => "fig2-full",
            FigureName::Fig2Partial => "fig2-partial",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
            FigureName::AmpdampFull => "ampdamp-full",
            FigureName::AmpdampPartial => "ampdamp-partial",
        }
    }
}

pub struct FigureRequest<'a> {
    pub name: FigureName,
    pub grid: Option<GridSpec>,
    pub out_dir: &'a Path,
    pub overlay: Option<&'a Path>,
}

fn describe(cfg: &ProtocolConfig) -> String {
    format!(
        "dim={} mode={} bound={} family={}",
        cfg.dim(),
        cfg.mode().name(),
        cfg.bound().name(),
        cfg.family().name()
    )
}

struct Writer<'a> {
    out_dir: &'a Path,
    command: String,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, file: &str, config: String, grid: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let path = self.out_dir.join(file);
        let manifest = RunManifest {
            command: self.command.clone(),
            config,
            grid: grid.to_owned(),
            output_path: path.display().to_string(),
            seed: None,
        };
        write_csv(&path, &manifest, header, rows)?;
        self.written.push(path);
        Ok(())
    }
}

fn rate_rows(cfg: &ProtocolConfig, points: &[f64]) -> CliResult<Vec<Vec<String>>> {
    points
        .par_iter()
        .map(|&q| {
            let r = key_rate(cfg, q)?;
            Ok(vec![num(q), num(r.key_rate)])
        })
        .collect()
}

/// Rate curve per dimension plus a `dim,tolerance` summary.
fn rate_family(
    w: &mut Writer,
    prefix: &str,
    dims: &[usize],
    mode: Mode,
    family: ChannelFamily,
    spec: Option<GridSpec>,
) -> CliResult<()> {
    let mut summary = Vec::new();
    for &d in dims {
        let cfg = ProtocolConfig::new(d, mode, BoundSelector::Winter, family.clone())?;
        let grid = Grid::resolve(spec, family.noise_limit(d), !matches!(family, ChannelFamily::Depolarizing));
        let rows = rate_rows(&cfg, &grid.points)?;
        w.write(&format!("{prefix}_D{d}.csv"), describe(&cfg), &grid.description, &["noise", "key_rate"], &rows)?;
        summary.push(vec![d.to_string(), num(noise_tolerance(&cfg)?.noise)]);
    }
    let config = format!("mode={} bound=winter family={}", mode.name(), family.name());
    w.write(&format!("{prefix}_tolerance.csv"), config, "bisection", &["dim", "tolerance"], &summary)
}

fn qubit_curves(w: &mut Writer, spec: Option<GridSpec>) -> CliResult<()> {
    let grid = Grid::resolve(spec, LEMMA_Q_MAX, true);
    let mut summary = Vec::new();
    for bound in [BoundSelector::Winter, BoundSelector::LemmaD2] {
        let cfg = ProtocolConfig::new(2, Mode::Full, bound, ChannelFamily::Depolarizing)?;
        let points: Vec<f64> = match bound {
            BoundSelector::LemmaD2 => grid.points.iter().copied().filter(|q| *q <= LEMMA_Q_MAX).collect(),
            _ => grid.points.clone(),
        };
        let rows = rate_rows(&cfg, &points)?;
        w.write(&format!("fig3_{}.csv", bound.name()), describe(&cfg), &grid.description, &["noise", "key_rate"], &rows)?;
        summary.push(vec![bound.name().to_owned(), num(noise_tolerance(&cfg)?.noise)]);
    }
    w.write("fig3_tolerance.csv", String::from("dim=2 mode=full family=depolarizing"), "bisection", &["bound", "tolerance"], &summary)
}

type DeltaCurve = fn(f64) -> qkdkr_core::Result<f64>;

fn delta_curves(w: &mut Writer, spec: Option<GridSpec>) -> CliResult<()> {
    let grid = Grid::resolve(spec, LEMMA_Q_MAX, true);
    fn eps(q: f64) -> f64 {
        (q * (1.0 - q)).max(0.0).sqrt()
    }
    let curves: [(&str, DeltaCurve); 3] = [
        ("winter", |q| Ok(winter_delta_bound(eps(q), 2)?.value)),
        ("lemma_d2", |q| Ok(lemma_delta_bound(q).value)),
        ("wilde_conjecture", |q| Ok(wilde_conjecture_curve(eps(q), 2)?.value)),
    ];
    if grid.points.iter().any(|q| *q > 0.5) {
        return Err(CliError::usage("fig4 grid must stay within [0, 0.5]"));
    }
    for (name, f) in &curves {
        let rows = grid
            .points
            .iter()
            .map(|&q| Ok(vec![num(q), num(f(q)?)]))
            .collect::<CliResult<Vec<_>>>()?;
        let config = format!("dim=2 family=depolarizing curve={name} epsilon=sqrt(q(1-q))");
        w.write(&format!("fig4_{name}.csv"), config, &grid.description, &["noise", "delta_bound"], &rows)?;
    }
    Ok(())
}

fn sanitize(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Reads `label,noise,key_rate` rows. Lines starting with `#` are skipped.
fn read_overlay(path: &Path) -> CliResult<BTreeMap<String, Vec<(f64, f64)>>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let bad = |line: usize, msg: String| CliError::Input(format!("{}: line {line}: {msg}", path.display()));
    let mut curves: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut header = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if !header {
            if cols != ["label", "noise", "key_rate"] {
                return Err(bad(line_no, format!("expected header `label,noise,key_rate`, got `{line}`")));
            }
            header = true;
            continue;
        }
        let [label, q, r] = cols.as_slice() else {
            return Err(bad(line_no, format!("expected 3 columns, got {}", cols.len())));
        };
        let parse = |s: &str, what: &str| s.parse::<f64>().map_err(|e| bad(line_no, format!("{what} `{s}`: {e}")));
        curves.entry((*label).to_owned()).or_default().push((parse(q, "noise")?, parse(r, "key_rate")?));
    }
    if curves.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    Ok(curves)
}

pub fn run_figure(req: &FigureRequest) -> CliResult<Vec<PathBuf>> {
    if req.overlay.is_some() && req.name != FigureName::Fig1 {
        return Err(CliError::usage("--overlay is only accepted by fig1"));
    }
    fs::create_dir_all(req.out_dir)?;
    let mut w = Writer { out_dir: req.out_dir, command: format!("figure {}", req.name.name()), written: Vec::new() };
    let tens: Vec<usize> = (1..=11).map(|k| 10 * k).collect();
    match req.name {
        FigureName::Fig1 => {
            let dims: Vec<usize> = (2..=8).collect();
            rate_family(&mut w, "fig1", &dims, Mode::Full, ChannelFamily::Depolarizing, req.grid)?;
            if let Some(path) = req.overlay {
                for (label, pts) in read_overlay(path)? {
                    let rows: Vec<Vec<String>> = pts.iter().map(|(q, r)| vec![num(*q), num(*r)]).collect();
                    let config = format!("overlay label={label} source={} (external data, not computed)", path.display());
                    w.write(&format!("fig1_overlay_{}.csv", sanitize(&label)), config, "as supplied", &["noise", "key_rate"], &rows)?;
                }
            }
        }
        FigureName::Fig2Full => rate_family(&mut w, "fig2-full", &tens, Mode::Full, ChannelFamily::Depolarizing, req.grid)?,
        FigureName::Fig2Partial => {
            rate_family(&mut w, "fig2-partial", &tens, Mode::Partial, ChannelFamily::Depolarizing, req.grid)?
        }
        FigureName::Fig3 => qubit_curves(&mut w, req.grid)?,
        FigureName::Fig4 => delta_curves(&mut w, req.grid)?,
        FigureName::AmpdampFull => {
            rate_family(&mut w, "ampdamp-full", &[4, 8, 12], Mode::Full, ChannelFamily::AmplitudeDamping, req.grid)?
        }
        FigureName::AmpdampPartial => {
            rate_family(&mut w, "ampdamp-partial", &[4, 8, 12], Mode::Partial, ChannelFamily::AmplitudeDamping, req.grid)?
        }
    }
    Ok(w.written)
}
