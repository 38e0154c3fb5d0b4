//! Benchmark runs, convergence output and the command line front end.

pub mod benchmarks;
mod cli;
pub mod domains;

pub use benchmarks::{make_benchmark, Benchmark, BenchmarkId};
pub use cli::{run_cli, RunOptions};

use crate::adaptivity::{afem_loop, AfemConfig, AfemError, ConvergenceRecord, LevelView};
use crate::mesh::save_mesh;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum DriverError {
    Afem(AfemError),
    Io(std::io::Error),
    Multilevel(crate::multilevel::MultilevelError),
}

impl std::fmt::Display for DriverError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DriverError::Afem(e) => write!(f, "{e}"),
            DriverError::Io(e) => write!(f, "io error: {e}"),
            DriverError::Multilevel(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DriverError {}

impl From<AfemError> for DriverError {
    fn from(e: AfemError) -> Self {
        DriverError::Afem(e)
    }
}

impl From<std::io::Error> for DriverError {
    fn from(e: std::io::Error) -> Self {
        DriverError::Io(e)
    }
}

/// Write the convergence history as CSV. Absent values stay empty; floats
/// carry 17 significant digits so that reruns diff cleanly.
pub fn write_csv(records: &[ConvergenceRecord], path: &Path) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "level,N,error,eta,osc_f,osc_g,iters,eta_alg,seconds")?;
    for r in records {
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e},{},{},{:.6e}",
            r.level,
            r.n,
            fmt_opt(r.error),
            r.eta,
            r.osc_f,
            r.osc_g,
            r.iterations,
            fmt_opt(r.eta_alg),
            r.seconds
        )?;
    }
    Ok(())
}

/// Mesh dump path for one level, derived from the CSV path.
fn mesh_dump_path(out: &Path, level: usize) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    out.with_file_name(format!("{stem}_mesh_{level:03}.txt"))
}

/// Execute a benchmark run: adaptive loop, CSV output, optional mesh dumps
/// and the optional contraction report.
pub fn run_benchmark(opts: &RunOptions) -> Result<Vec<ConvergenceRecord>, DriverError> {
    let bench = make_benchmark(opts.benchmark, opts.kappa);
    let config = AfemConfig {
        theta: opts.theta,
        mode: opts.mode,
        solver: opts.solver,
        smoothing_steps: opts.smoothing_steps,
        tol: opts.tol,
        max_dofs: opts.max_dofs,
        max_levels: opts.max_levels,
        build_hierarchy: opts.report_contraction
            || opts.solver != crate::adaptivity::SolverChoice::Direct,
    };
    let mut dump_error: Option<std::io::Error> = None;
    let outcome = {
        let mut observer = |view: &LevelView<'_>| {
            if opts.dump_meshes && dump_error.is_none() {
                let path = mesh_dump_path(&opts.out, view.level);
                if let Err(e) = save_mesh(&view.space.mesh, &path) {
                    if let crate::mesh::MeshError::Io(io) = e {
                        dump_error = Some(io);
                    }
                }
            }
            println!(
                "level {:3}  N {:8}  eta {:.6e}{}{}",
                view.level,
                view.record.n,
                view.record.eta,
                view.record
                    .error
                    .map(|e| format!("  error {e:.6e}"))
                    .unwrap_or_default(),
                view.record
                    .eta_alg
                    .map(|e| format!("  iters {}  eta_alg {e:.3e}", view.record.iterations))
                    .unwrap_or_default(),
            );
        };
        afem_loop(&bench.problem, &config, Some(&mut observer))?
    };
    if let Some(e) = dump_error {
        return Err(DriverError::Io(e));
    }
    write_csv(&outcome.records, &opts.out)?;

    if opts.report_contraction {
        match &outcome.hierarchy {
            Some(h) if h.n_levels() > 1 => {
                let top = h.n_levels() - 1;
                let path = opts.out.with_extension("contraction.txt");
                let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
                println!("contraction of I - BA on the finest level:");
                for r in [1usize, 2, 3, 5] {
                    let (c_norm, c_small) = h
                        .iteration_matrix_norm(top, r)
                        .map_err(DriverError::Multilevel)?;
                    println!("  r = {r}: C = {c_norm:.4}, c = {c_small:.2}");
                    writeln!(out, "{r} {c_norm:.16e} {c_small:.16e}")?;
                }
            }
            _ => {
                eprintln!("contraction report requires an extended-space hierarchy with at least two levels");
            }
        }
    }
    Ok(outcome.records)
}
