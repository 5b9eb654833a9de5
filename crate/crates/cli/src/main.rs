//! `polarize`: command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 bench finished
//! but some exact solves hit the timeout.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use polarize_core::bench::{self, Grid, RunOptions, SolverKind};
use polarize_core::debate;
use polarize_core::generator::{generate, GenConfig};
use polarize_core::model::{self, Bipartition};
use polarize_core::reduction::{self, MaxcutGraph};
use polarize_core::solvers::{self, BnbOptions, LsOptions};

#[derive(Parser)]
#[command(name = "polarize", version, about = "Bipartite polarization of user debate graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance whose polarization is steered by alpha.
    Gen {
        /// Number of users.
        #[arg(long)]
        m: usize,
        /// Polarization parameter in (0, 1].
        #[arg(long)]
        alpha: f64,
        /// RNG seed (printed to stderr when defaulted).
        #[arg(long)]
        seed: Option<u64>,
        /// Output instance path.
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Maximize the polarization of an instance.
    Solve {
        #[arg(long, value_enum)]
        method: Method,
        /// Seed for local search and the branch-and-bound warm start.
        #[arg(long)]
        seed: Option<u64>,
        /// Wall-clock budget for branch-and-bound, in seconds.
        #[arg(long = "timeout-s")]
        timeout_s: Option<f64>,
        /// Largest node count accepted by the exhaustive solver.
        #[arg(long, default_value_t = solvers::DEFAULT_EXHAUSTIVE_CAP)]
        cap: usize,
        /// Report time_ms as 0 so output is byte-reproducible.
        #[arg(long)]
        no_timing: bool,
        /// Instance JSON.
        instance: PathBuf,
    },
    /// Evaluate one bipartition: reads an instance and a JSON array of "L"/"R".
    Eval {
        instance: PathBuf,
        assignment: PathBuf,
    },
    /// Build the user debate graph of a debate-tree JSON.
    Debate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Output instance path (stdout when omitted).
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Reduce a maxcut instance (`n m` then `u v` lines) to a polarization instance.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Brute-force maximum cut of a maxcut instance.
    Maxcut {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run the experiment grid and write one CSV row per (instance, solver).
    Bench {
        /// Comma-separated alpha values.
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.08,0.11,0.14,0.4,0.7,1.0")]
        alphas: Vec<f64>,
        /// Comma-separated node counts.
        #[arg(long, value_delimiter = ',', default_value = "25,30,35,40")]
        sizes: Vec<usize>,
        /// Instances per (alpha, m) cell.
        #[arg(long, default_value_t = 50)]
        reps: usize,
        /// Grid seed (printed to stderr when defaulted).
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated solvers: exhaustive, bnb, ls.
        #[arg(long, value_delimiter = ',', default_value = "bnb,ls")]
        solvers: Vec<SolverKind>,
        /// Per-instance budget for exact solvers, in seconds.
        #[arg(long = "timeout-s", default_value_t = 60.0)]
        timeout_s: f64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG with median time and search nodes against alpha.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Report time_ms as 0 so output is byte-reproducible.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exhaustive,
    Bnb,
    Ls,
}

enum Failure {
    Usage(String),
    Input(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `polarize --help` for usage");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn seed_or_default(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        eprintln!("seed: 0 (default)");
        0
    })
}

fn require_file(path: &Path) -> anyhow::Result<()> {
    if !path.is_file() {
        bail!("{}: no such file", path.display());
    }
    Ok(())
}

fn require_writable_parent(path: &Path) -> anyhow::Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        if !dir.is_dir() {
            bail!("{}: output directory does not exist", dir.display());
        }
    }
    Ok(())
}

fn timeout(seconds: f64) -> CliResult<Duration> {
    if !(seconds.is_finite() && seconds > 0.0) {
        return Err(Failure::Usage(format!("timeout must be a positive number of seconds, got {seconds}")));
    }
    Ok(Duration::from_secs_f64(seconds))
}

fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Gen { m, alpha, seed, out } => {
            require_writable_parent(&out)?;
            let cfg = GenConfig::new(m, alpha, seed_or_default(seed)).context("invalid generator configuration")?;
            let g = generate(&cfg).context("generation failed")?;
            model::save_instance(&g, &out)?;
        }

        Command::Solve {
            method,
            seed,
            timeout_s,
            cap,
            no_timing,
            instance,
        } => {
            if timeout_s.is_some() && !matches!(method, Method::Bnb) {
                return Err(Failure::Usage("--timeout-s only applies to --method bnb".into()));
            }
            require_file(&instance)?;
            let g = model::load_instance(&instance)?;
            let seed = match method {
                Method::Exhaustive => None,
                Method::Bnb | Method::Ls => Some(seed_or_default(seed)),
            };
            let mut result = match method {
                Method::Exhaustive => solvers::solve_exhaustive_capped(&g, cap)?,
                Method::Bnb => solvers::solve_bnb_with(
                    &g,
                    &BnbOptions {
                        timeout: timeout_s.map(timeout).transpose()?,
                        ls_seed: seed.unwrap_or(0),
                        ..BnbOptions::default()
                    },
                ),
                Method::Ls => solvers::solve_ls_with(&g, &LsOptions::new(seed.unwrap_or(0))),
            };
            if no_timing {
                result.stats.time_ms = 0.0;
            }
            let breakdown = model::evaluate(&g, &result.bipartition)?;
            let report = json!({
                "method": match method { Method::Exhaustive => "exhaustive", Method::Bnb => "bnb", Method::Ls => "ls" },
                "seed": seed,
                "bippol": result.bippol,
                "breakdown": breakdown,
                "assignment": result.bipartition,
                "stats": result.stats,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }

        Command::Eval { instance, assignment } => {
            require_file(&instance)?;
            require_file(&assignment)?;
            let g = model::load_instance(&instance)?;
            let text = fs::read_to_string(&assignment).with_context(|| assignment.display().to_string())?;
            let p: Bipartition = serde_json::from_str(&text)
                .with_context(|| format!("{}: expected a JSON array of \"L\"/\"R\"", assignment.display()))?;
            let breakdown = model::evaluate(&g, &p)?;
            println!("{}", serde_json::to_string_pretty(&breakdown).expect("serializable"));
        }

        Command::Debate { input, out } => {
            require_file(&input)?;
            if let Some(out) = &out {
                require_writable_parent(out)?;
            }
            let text = fs::read_to_string(&input).with_context(|| input.display().to_string())?;
            let g = debate::debate_to_graph(&text).with_context(|| input.display().to_string())?;
            match out {
                Some(out) => model::save_instance(&g, out)?,
                None => print!("{}", model::instance_to_json(&g)),
            }
        }

        Command::Reduce { input, out } => {
            require_file(&input)?;
            require_writable_parent(&out)?;
            let gc = read_maxcut(&input)?;
            model::save_instance(&reduction::reduce(&gc), &out)?;
        }

        Command::Maxcut { input } => {
            require_file(&input)?;
            let gc = read_maxcut(&input)?;
            let (cut, sides) = reduction::maxcut_bruteforce(&gc)?;
            let report = json!({ "cut": cut, "sides": sides.iter().map(|&s| u8::from(s)).collect::<Vec<_>>() });
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }

        Command::Bench {
            alphas,
            sizes,
            reps,
            seed,
            solvers,
            timeout_s,
            out,
            plot,
            no_timing,
        } => {
            require_writable_parent(&out)?;
            if let Some(plot) = &plot {
                require_writable_parent(plot)?;
            }
            let grid = Grid {
                alphas,
                sizes,
                replicates: reps,
                seed: seed_or_default(seed),
            };
            let opts = RunOptions {
                timeout: timeout(timeout_s)?,
                record_time: !no_timing,
            };
            let records = bench::run_matrix(&grid, &solvers, &opts)?;
            bench::emit_csv(&records, &out)?;
            let summary = bench::summarize(&records);
            if let Some(plot) = &plot {
                bench::emit_plot(&summary, plot)?;
            }
            print!("{}", bench::quality_table(&summary));
            let timeouts = records.iter().filter(|r| r.timeout).count();
            if timeouts > 0 {
                eprintln!("{timeouts} exact solve(s) hit the timeout");
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_maxcut(path: &Path) -> anyhow::Result<MaxcutGraph> {
    let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
    MaxcutGraph::parse(&text).with_context(|| path.display().to_string())
}
