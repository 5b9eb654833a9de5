//! Experiment driver: solve generated instances over an `(α, m)` grid.
//!
//! Instance seeds are derived per cell as
//! `seed::derive([TAG_CELL, grid_seed, alpha_index, size_index, replicate])`,
//! so any row can be regenerated on its own. The same seed drives the local
//! search and the B&B warm start.
//!
//! Cells run on the rayon pool; records come back in `(α, m, replicate,
//! solver)` order regardless of scheduling.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::generator::{generate, GenConfig, GenError};
use crate::model::UDebG;
use crate::seed;
use crate::solvers::{
    solve_bnb_with, solve_exhaustive, solve_ls, BnbOptions, SolveError, SolveResult,
};

pub const CSV_HEADER: &str = "alpha,m,rep,seed,solver,bippol,ls_ratio,time_ms,search_nodes,timeout";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exhaustive,
    Bnb,
    Ls,
}

impl SolverKind {
    pub fn is_exact(self) -> bool {
        !matches!(self, SolverKind::Ls)
    }

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exhaustive => "exhaustive",
            SolverKind::Bnb => "bnb",
            SolverKind::Ls => "ls",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(SolverKind::Exhaustive),
            "bnb" => Ok(SolverKind::Bnb),
            "ls" => Ok(SolverKind::Ls),
            other => Err(format!("unknown solver `{other}` (expected exhaustive, bnb or ls)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub alphas: Vec<f64>,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Per-instance budget for exact solvers.
    pub timeout: Duration,
    /// When false, `time_ms` is recorded as 0 so output is byte-reproducible.
    pub record_time: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            timeout: DEFAULT_TIMEOUT,
            record_time: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub alpha: f64,
    pub m: usize,
    pub rep: usize,
    pub seed: u64,
    pub solver: SolverKind,
    pub bippol: f64,
    /// Local search only, when an exact solver finished on the same instance.
    pub ls_ratio: Option<f64>,
    pub time_ms: f64,
    /// Search-tree nodes for exact solvers, improving flips for local search.
    pub search_nodes: u64,
    pub timeout: bool,
}

/// Seed of the instance in cell `(alpha_index, size_index)`, replicate `rep`.
pub fn cell_seed(grid_seed: u64, alpha_index: usize, size_index: usize, rep: usize) -> u64 {
    seed::derive(&[
        seed::TAG_CELL,
        grid_seed,
        alpha_index as u64,
        size_index as u64,
        rep as u64,
    ])
}

/// `ls / exact`, with `0 / 0` taken as 1.
pub fn ls_ratio(ls: f64, exact: f64) -> f64 {
    if exact <= 0.0 {
        if ls <= 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        ls / exact
    }
}

fn run_solver(g: &UDebG, kind: SolverKind, seed: u64, opts: &RunOptions) -> Result<SolveResult, SolveError> {
    match kind {
        SolverKind::Exhaustive => solve_exhaustive(g),
        SolverKind::Bnb => Ok(solve_bnb_with(
            g,
            &BnbOptions {
                timeout: Some(opts.timeout),
                ls_seed: seed,
                ..BnbOptions::default()
            },
        )),
        SolverKind::Ls => Ok(solve_ls(g, seed)),
    }
}

fn run_instance(
    grid: &Grid,
    (ai, mi, rep): (usize, usize, usize),
    solvers: &[SolverKind],
    opts: &RunOptions,
) -> Result<Vec<ExperimentRecord>, BenchError> {
    let (alpha, m) = (grid.alphas[ai], grid.sizes[mi]);
    let seed = cell_seed(grid.seed, ai, mi, rep);
    let g = generate(&GenConfig::new(m, alpha, seed)?)?;

    // Exact solvers go first so the local-search ratio has a reference.
    let mut results: Vec<Option<SolveResult>> = vec![None; solvers.len()];
    let mut schedule: Vec<usize> = (0..solvers.len()).collect();
    schedule.sort_by_key(|&i| !solvers[i].is_exact());
    for i in schedule {
        results[i] = Some(run_solver(&g, solvers[i], seed, opts)?);
    }
    let exact = solvers
        .iter()
        .zip(&results)
        .filter(|(k, _)| k.is_exact())
        .filter_map(|(_, r)| r.as_ref())
        .find(|r| r.stats.optimal)
        .map(|r| r.bippol);

    Ok(solvers
        .iter()
        .zip(results)
        .map(|(&solver, r)| {
            let r = r.expect("every solver ran");
            ExperimentRecord {
                alpha,
                m,
                rep,
                seed,
                solver,
                bippol: r.bippol,
                ls_ratio: match (solver, exact) {
                    (SolverKind::Ls, Some(x)) => Some(ls_ratio(r.bippol, x)),
                    _ => None,
                },
                time_ms: if opts.record_time { r.stats.time_ms } else { 0.0 },
                search_nodes: if solver.is_exact() {
                    r.stats.search_nodes
                } else {
                    r.stats.ls_steps
                },
                timeout: r.stats.timed_out,
            }
        })
        .collect())
}

pub fn run_matrix(
    grid: &Grid,
    solvers: &[SolverKind],
    opts: &RunOptions,
) -> Result<Vec<ExperimentRecord>, BenchError> {
    if grid.replicates == 0 {
        return Err(BenchError::InvalidGrid("replicates must be at least 1".into()));
    }
    if grid.alphas.is_empty() || grid.sizes.is_empty() || solvers.is_empty() {
        return Err(BenchError::InvalidGrid(
            "alphas, sizes and solvers must be non-empty".into(),
        ));
    }
    if opts.timeout.is_zero() {
        return Err(BenchError::InvalidGrid("timeout must be positive".into()));
    }
    for &alpha in &grid.alphas {
        GenConfig::new(2, alpha, 0)?;
    }
    for &m in &grid.sizes {
        GenConfig::new(m, 1.0, 0)?;
    }

    let jobs: Vec<(usize, usize, usize)> = (0..grid.alphas.len())
        .flat_map(|ai| {
            (0..grid.sizes.len()).flat_map(move |mi| (0..grid.replicates).map(move |rep| (ai, mi, rep)))
        })
        .collect();
    let per_job: Vec<Vec<ExperimentRecord>> = jobs
        .par_iter()
        .map(|&job| run_instance(grid, job, solvers, opts))
        .collect::<Result<_, _>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Spread {
    /// Min, lower median and max; `None` for an empty slice.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            min: v[0],
            median: v[(v.len() - 1) / 2],
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub alpha: f64,
    pub m: usize,
    pub solver: SolverKind,
    pub count: usize,
    pub timeouts: usize,
    pub bippol: Spread,
    pub ls_ratio: Option<Spread>,
    pub time_ms: Spread,
    pub search_nodes: Spread,
}

/// Per-`(α, m, solver)` spreads, in order of first appearance.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<CellSummary> {
    let mut keys: Vec<(f64, usize, SolverKind)> = Vec::new();
    for r in records {
        let key = (r.alpha, r.m, r.solver);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(alpha, m, solver)| {
            let group: Vec<&ExperimentRecord> = records
                .iter()
                .filter(|r| r.alpha == alpha && r.m == m && r.solver == solver)
                .collect();
            let collect = |f: fn(&ExperimentRecord) -> f64| -> Vec<f64> { group.iter().map(|r| f(r)).collect() };
            let ratios: Vec<f64> = group.iter().filter_map(|r| r.ls_ratio).collect();
            CellSummary {
                alpha,
                m,
                solver,
                count: group.len(),
                timeouts: group.iter().filter(|r| r.timeout).count(),
                bippol: Spread::of(&collect(|r| r.bippol)).expect("non-empty group"),
                ls_ratio: Spread::of(&ratios),
                time_ms: Spread::of(&collect(|r| r.time_ms)).expect("non-empty group"),
                search_nodes: Spread::of(&collect(|r| r.search_nodes as f64)).expect("non-empty group"),
            }
        })
        .collect()
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let ratio = r.ls_ratio.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.3},{},{}",
            r.alpha, r.m, r.rep, r.seed, r.solver, r.bippol, ratio, r.time_ms, r.search_nodes, r.timeout
        )
        .expect("writing to a String");
    }
    out
}

pub fn emit_csv(records: &[ExperimentRecord], path: impl AsRef<Path>) -> Result<(), BenchError> {
    write_file(path.as_ref(), &records_to_csv(records))
}

pub fn emit_plot(summary: &[CellSummary], path: impl AsRef<Path>) -> Result<(), BenchError> {
    write_file(path.as_ref(), &render_svg(summary))
}

fn write_file(path: &Path, contents: &str) -> Result<(), BenchError> {
    fs::write(path, contents).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Text table in the layout of the usual quality comparison: bippol spread of
/// the exact solver and local-search ratio spread, per `(m, α)`.
pub fn quality_table(summary: &[CellSummary]) -> String {
    let mut out = String::from("m\talpha\tsolver\tbippol_min\tbippol_med\tbippol_max\tratio_min\tratio_med\tratio_max\tnodes_med\ttimeouts\n");
    for c in summary {
        let ratio = |f: fn(&Spread) -> f64| c.ls_ratio.as_ref().map(|s| format!("{:.4}", f(s))).unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}\t{}\t{}\t{}",
            c.m,
            c.alpha,
            c.solver,
            c.bippol.min,
            c.bippol.median,
            c.bippol.max,
            ratio(|s| s.min),
            ratio(|s| s.median),
            ratio(|s| s.max),
            c.search_nodes.median,
            c.timeouts
        )
        .expect("writing to a String");
    }
    out
}

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

struct Panel {
    title: &'static str,
    floor: f64,
    metric: fn(&CellSummary) -> f64,
}

/// Two log-scale panels (median time, median search nodes) against α, one
/// series per `(solver, m)`.
pub fn render_svg(summary: &[CellSummary]) -> String {
    let panels = [
        Panel {
            title: "median time (ms)",
            floor: 1e-3,
            metric: |c| c.time_ms.median,
        },
        Panel {
            title: "median search nodes",
            floor: 1.0,
            metric: |c| c.search_nodes.median,
        },
    ];

    let mut series: Vec<(SolverKind, usize)> = Vec::new();
    for c in summary {
        if !series.contains(&(c.solver, c.m)) {
            series.push((c.solver, c.m));
        }
    }
    let (a_min, a_max) = summary
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.alpha), hi.max(c.alpha)));
    let (a_min, a_max) = if summary.is_empty() {
        (0.0, 1.0)
    } else if a_max - a_min < 1e-9 {
        (a_min - 0.05, a_max + 0.05)
    } else {
        (a_min, a_max)
    };

    let width = 2.0 * (PANEL_W + MARGIN) + MARGIN;
    let height = PANEL_H + 2.0 * MARGIN + 20.0 * series.len() as f64;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    for (pi, panel) in panels.iter().enumerate() {
        let x0 = MARGIN + pi as f64 * (PANEL_W + MARGIN);
        let y0 = MARGIN;
        let values: Vec<f64> = summary.iter().map(|c| (panel.metric)(c).max(panel.floor)).collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min).max(panel.floor);
        let hi = values.iter().cloned().fold(panel.floor, f64::max);
        let (d_lo, mut d_hi) = (lo.log10().floor(), hi.log10().ceil());
        if d_hi <= d_lo {
            d_hi = d_lo + 1.0;
        }
        let px = |a: f64| x0 + (a - a_min) / (a_max - a_min) * PANEL_W;
        let py = |v: f64| y0 + PANEL_H - (v.max(panel.floor).log10() - d_lo) / (d_hi - d_lo) * PANEL_H;

        writeln!(
            svg,
            r##"<g class="panel" data-metric="{}"><rect x="{x0}" y="{y0}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##,
            panel.title
        )
        .unwrap();
        writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#, x0 + PANEL_W / 2.0, y0 - 12.0, panel.title).unwrap();
        writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">alpha</text>"#, x0 + PANEL_W / 2.0, y0 + PANEL_H + 32.0).unwrap();
        let mut decade = d_lo;
        while decade <= d_hi {
            let y = py(10f64.powf(decade));
            writeln!(svg, r##"<line x1="{x0}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/><text x="{}" y="{}" text-anchor="end">1e{decade}</text>"##, x0 + PANEL_W, x0 - 4.0, y + 4.0).unwrap();
            decade += 1.0;
        }
        let mut ticks: Vec<f64> = summary.iter().map(|c| c.alpha).collect();
        ticks.sort_by(f64::total_cmp);
        ticks.dedup();
        for a in ticks {
            writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{a}</text>"#, px(a), y0 + PANEL_H + 16.0).unwrap();
        }

        for (si, &(solver, m)) in series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            let label = format!("{solver} m={m}");
            let mut pts: Vec<(f64, f64)> = summary
                .iter()
                .filter(|c| c.solver == solver && c.m == m)
                .map(|c| (c.alpha, (panel.metric)(c)))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let path: Vec<String> = pts.iter().map(|&(a, v)| format!("{:.2},{:.2}", px(a), py(v))).collect();
            writeln!(svg, r#"<polyline class="series" data-series="{label}" fill="none" stroke="{color}" points="{}"/>"#, path.join(" ")).unwrap();
            for &(a, v) in &pts {
                writeln!(svg, r#"<circle class="point" data-series="{label}" cx="{:.2}" cy="{:.2}" r="3" fill="{color}"><title>{label} alpha={a}: {v}</title></circle>"#, px(a), py(v)).unwrap();
            }
        }
        svg.push_str("</g>\n");
    }

    for (si, &(solver, m)) in series.iter().enumerate() {
        let y = MARGIN + PANEL_H + 50.0 + 20.0 * si as f64;
        let color = PALETTE[si % PALETTE.len()];
        writeln!(svg, r#"<rect x="{MARGIN}" y="{}" width="12" height="12" fill="{color}"/><text x="{}" y="{}">{solver} m={m}</text>"#, y - 10.0, MARGIN + 18.0, y).unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}
