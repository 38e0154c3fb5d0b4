//! Command line interface and the key=value config file.

use super::benchmarks::BenchmarkId;
use crate::adaptivity::SolverChoice;
use crate::element::SpaceMode;
use clap::Parser;
use std::path::{Path, PathBuf};

/// Adaptive plate-bending benchmarks with quintic C1 elements.
#[derive(Parser, Debug, Default)]
#[command(name = "argyris", disable_help_flag = false)]
struct Cli {
    /// Benchmark problem: B1 (square), B2 (L-shape), B3 (slit),
    /// B4 (L-shape, mixed conditions and point load).
    #[arg(long)]
    benchmark: Option<String>,
    /// Bulk parameter of the marking step, in (0, 1].
    #[arg(long)]
    theta: Option<f64>,
    /// Linear solver: direct, mg or pcg.
    #[arg(long)]
    solver: Option<String>,
    /// Element space: standard or extended.
    #[arg(long)]
    mode: Option<String>,
    /// Pre-/post-smoothing steps of the V-cycle.
    #[arg(long)]
    r: Option<usize>,
    /// Relative tolerance of the algebraic stopping criterion.
    #[arg(long)]
    tol: Option<f64>,
    /// Oscillation parameter of the B4 boundary datum.
    #[arg(long)]
    kappa: Option<f64>,
    /// Stop when the number of free dofs reaches this bound.
    #[arg(long = "max-dofs")]
    max_dofs: Option<usize>,
    /// Stop after this many levels.
    #[arg(long = "max-levels")]
    max_levels: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Save the triangulation of every level next to the CSV.
    #[arg(long = "dump-meshes")]
    dump_meshes: bool,
    /// Measure the norm of the multigrid iteration matrix for r = 1, 2, 3, 5.
    #[arg(long = "report-contraction")]
    report_contraction: bool,
    /// Plain-text key=value file mirroring every flag; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Fully resolved run options.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub benchmark: BenchmarkId,
    pub theta: f64,
    pub solver: SolverChoice,
    pub mode: SpaceMode,
    pub smoothing_steps: usize,
    pub tol: f64,
    pub kappa: f64,
    pub max_dofs: usize,
    pub max_levels: usize,
    pub out: PathBuf,
    pub dump_meshes: bool,
    pub report_contraction: bool,
}

fn parse_solver(s: &str) -> Result<SolverChoice, String> {
    match s {
        "direct" => Ok(SolverChoice::Direct),
        "mg" => Ok(SolverChoice::Multigrid),
        "pcg" => Ok(SolverChoice::Pcg),
        other => Err(format!("unknown solver `{other}` (expected direct, mg or pcg)")),
    }
}

fn parse_mode(s: &str) -> Result<SpaceMode, String> {
    match s {
        "standard" => Ok(SpaceMode::Standard),
        "extended" => Ok(SpaceMode::Extended),
        other => Err(format!("unknown mode `{other}` (expected standard or extended)")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("expected a boolean, got `{other}`")),
    }
}

/// Apply a config file underneath already-parsed flags.
fn merge_config(cli: &mut Cli, path: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not key=value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let err = |e: String| format!("config line {}: {e}", lineno + 1);
        match key {
            "benchmark" => {
                if cli.benchmark.is_none() {
                    cli.benchmark = Some(value.into());
                }
            }
            "theta" => {
                if cli.theta.is_none() {
                    cli.theta = Some(value.parse().map_err(|e| err(format!("{e}")))?);
                }
            }
            "solver" => {
                if cli.solver.is_none() {
                    cli.solver = Some(value.into());
                }
            }
            "mode" => {
                if cli.mode.is_none() {
                    cli.mode = Some(value.into());
                }
            }
            "r" => {
                if cli.r.is_none() {
                    cli.r = Some(value.parse().map_err(|e| err(format!("{e}")))?);
                }
            }
            "tol" => {
                if cli.tol.is_none() {
                    cli.tol = Some(value.parse().map_err(|e| err(format!("{e}")))?);
                }
            }
            "kappa" => {
                if cli.kappa.is_none() {
                    cli.kappa = Some(value.parse().map_err(|e| err(format!("{e}")))?);
                }
            }
            "max-dofs" => {
                if cli.max_dofs.is_none() {
                    cli.max_dofs = Some(value.parse().map_err(|e| err(format!("{e}")))?);
                }
            }
            "max-levels" => {
                if cli.max_levels.is_none() {
                    cli.max_levels = Some(value.parse().map_err(|e| err(format!("{e}")))?);
                }
            }
            "out" => {
                if cli.out.is_none() {
                    cli.out = Some(value.into());
                }
            }
            "dump-meshes" => {
                if !cli.dump_meshes {
                    cli.dump_meshes = parse_bool(value).map_err(err)?;
                }
            }
            "report-contraction" => {
                if !cli.report_contraction {
                    cli.report_contraction = parse_bool(value).map_err(err)?;
                }
            }
            other => return Err(format!("config line {}: unknown key `{other}`", lineno + 1)),
        }
    }
    Ok(())
}

fn resolve(mut cli: Cli) -> Result<RunOptions, String> {
    if let Some(path) = cli.config.take() {
        merge_config(&mut cli, &path)?;
    }
    let benchmark: BenchmarkId = cli
        .benchmark
        .ok_or_else(|| "missing --benchmark (B1, B2, B3 or B4)".to_string())?
        .parse()?;
    let opts = RunOptions {
        benchmark,
        theta: cli.theta.unwrap_or(0.5),
        solver: parse_solver(cli.solver.as_deref().unwrap_or("direct"))?,
        mode: parse_mode(cli.mode.as_deref().unwrap_or("extended"))?,
        smoothing_steps: cli.r.unwrap_or(1),
        tol: cli.tol.unwrap_or(0.1),
        kappa: cli.kappa.unwrap_or(0.0),
        max_dofs: cli.max_dofs.unwrap_or(10_000),
        max_levels: cli.max_levels.unwrap_or(100),
        out: cli.out.unwrap_or_else(|| PathBuf::from("convergence.csv")),
        dump_meshes: cli.dump_meshes,
        report_contraction: cli.report_contraction,
    };
    Ok(opts)
}

/// Parse options (flags over config file over defaults). Exposed for tests.
pub(crate) fn options_from_args<I>(args: I) -> Result<RunOptions, String>
where
    I: IntoIterator<Item = String>,
{
    let argv = std::iter::once("argyris".to_string()).chain(args);
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    resolve(cli)
}

/// Run the command line interface; returns the process exit code.
pub fn run_cli<I: Iterator<Item = String>>(args: I) -> i32 {
    let opts = match options_from_args(args) {
        Ok(opts) => opts,
        Err(msg) => {
            eprintln!("{msg}");
            return 2;
        }
    };
    match super::run_benchmark(&opts) {
        Ok(records) => {
            println!(
                "finished after {} levels, wrote {}",
                records.len(),
                opts.out.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
