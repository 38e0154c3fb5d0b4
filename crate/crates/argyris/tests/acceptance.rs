//! Acceptance suite: end-to-end reproduction of the benchmark behaviour.
//!
//! Heavy runs are computed once, cached and shared between criteria; a
//! global lock serialises them so that solve-time measurements stay clean.
//! Every criterion prints one pass/fail line.

use argyris::adaptivity::{
    afem_loop, AfemConfig, ConvergenceRecord, LevelView, SolverChoice,
};
use argyris::assembly::KahanSum;
use argyris::driver::benchmarks::{make_benchmark, BenchmarkId};
use argyris::element::{FeFunction, FeSpace, SpaceMode};
use argyris::mesh::Triangulation;
use argyris::multilevel::Hierarchy;
use argyris::quadrature::triangle_rule;
use argyris::Vec2;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

// ---------------------------------------------------------------------------
// cached runs
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
struct SandwichRow {
    n: usize,
    contraction: f64,
    eta_alg: f64,
    energy_error: f64,
}

#[derive(Default)]
struct RunData {
    records: Vec<ConvergenceRecord>,
    /// (r, C) of the finest level, measured after the run.
    contraction: Vec<(usize, f64)>,
    /// Lemma-4 style data per level (B3 sandwich run).
    sandwich: Vec<SandwichRow>,
    /// min and max triangle diameter of the final mesh.
    diameter_extremes: (f64, f64),
    /// Energy distance of each level's solution to the finest one,
    /// by quadrature over the finest mesh (index = level).
    error_to_final: Vec<f64>,
}

fn cache() -> &'static Mutex<HashMap<String, Arc<RunData>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<RunData>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The one lock all heavy computations run under.
fn run_lock() -> &'static Mutex<()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    LOCK.get_or_init(|| Mutex::new(()))
}

fn cached(key: &str, build: impl FnOnce() -> RunData) -> Arc<RunData> {
    if let Some(hit) = cache().lock().unwrap().get(key) {
        return hit.clone();
    }
    let _guard = run_lock().lock().unwrap();
    if let Some(hit) = cache().lock().unwrap().get(key) {
        return hit.clone();
    }
    eprintln!("[acceptance] computing {key}");
    let start = std::time::Instant::now();
    let data = Arc::new(build());
    eprintln!(
        "[acceptance] {key} done in {:.1}s ({} levels)",
        start.elapsed().as_secs_f64(),
        data.records.len()
    );
    cache().lock().unwrap().insert(key.to_string(), data.clone());
    data
}

fn diameter_extremes(mesh: &Triangulation) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for t in 0..mesh.triangles.len() {
        let d = mesh.diameter(t);
        min = min.min(d);
        max = max.max(d);
    }
    (min, max)
}

/// Plain run, nothing stored beyond the records.
fn plain_run(
    key: &str,
    bench: BenchmarkId,
    config: AfemConfig,
    measure_contraction: bool,
) -> Arc<RunData> {
    cached(key, || {
        let benchmark = make_benchmark(bench, 0.0);
        let outcome = afem_loop(&benchmark.problem, &config, None).expect("run succeeds");
        let mut contraction = Vec::new();
        if measure_contraction {
            let h = outcome.hierarchy.as_ref().expect("hierarchy kept");
            let top = h.n_levels() - 1;
            for r in [1usize, 2, 3, 5] {
                let (c, _) = h.iteration_matrix_norm(top, r).expect("power iteration");
                eprintln!("[acceptance] {key}: C(r={r}) = {c:.4}");
                contraction.push((r, c));
            }
        }
        RunData {
            diameter_extremes: diameter_extremes(&outcome.final_mesh),
            records: outcome.records,
            contraction,
            ..Default::default()
        }
    })
}

fn uniform_run(bench: BenchmarkId, max_dofs: usize) -> Arc<RunData> {
    let key = format!("uniform-{bench:?}-{max_dofs}");
    plain_run(
        &key,
        bench,
        AfemConfig {
            theta: 1.0,
            mode: SpaceMode::Extended,
            solver: SolverChoice::Direct,
            max_dofs,
            max_levels: 100,
            build_hierarchy: true,
            ..Default::default()
        },
        false,
    )
}

/// Adaptive run with the direct solver; stores every level so the error to
/// the finest solution can be measured afterwards.
fn adaptive_direct_run(bench: BenchmarkId, mode: SpaceMode, max_dofs: usize) -> Arc<RunData> {
    let key = format!("adaptive-{bench:?}-{mode:?}-{max_dofs}");
    cached(&key, || {
        let benchmark = make_benchmark(bench, 0.0);
        let config = AfemConfig {
            theta: 0.5,
            mode,
            solver: SolverChoice::Direct,
            max_dofs,
            max_levels: 200,
            build_hierarchy: mode == SpaceMode::Extended,
            ..Default::default()
        };
        let mut stored: Vec<(Triangulation, Vec<f64>)> = Vec::new();
        let mut observer = |view: &LevelView<'_>| {
            stored.push((view.space.mesh.clone(), view.u_h.coeffs.clone()));
        };
        let outcome = afem_loop(&benchmark.problem, &config, Some(&mut observer)).expect("run");
        let error_to_final = energy_distance_to_final(&stored, mode);
        RunData {
            diameter_extremes: diameter_extremes(&outcome.final_mesh),
            records: outcome.records,
            error_to_final,
            ..Default::default()
        }
    })
}

/// ||| u_L - u_l ||| for every level l, integrated over the finest mesh
/// through the ancestor chains (works for both element spaces; no global
/// reference value is involved, so the f64 cancellation floor of the energy
/// identity does not apply).
fn energy_distance_to_final(stored: &[(Triangulation, Vec<f64>)], mode: SpaceMode) -> Vec<f64> {
    let spaces: Vec<FeSpace> = stored
        .iter()
        .map(|(mesh, _)| FeSpace::new(mesh.clone(), mode).expect("stored mesh is valid"))
        .collect();
    let functions: Vec<FeFunction> = stored
        .iter()
        .map(|(_, coeffs)| FeFunction::from_coeffs(coeffs.clone()))
        .collect();
    let last = spaces.len() - 1;
    let rule = triangle_rule(10);
    // ancestor[l][t] = triangle of level l containing final triangle t
    let n_final = spaces[last].mesh.triangles.len();
    let mut ancestor: Vec<Vec<usize>> = vec![Vec::new(); spaces.len()];
    ancestor[last] = (0..n_final).collect();
    for l in (0..last).rev() {
        let prov = spaces[l + 1].mesh.provenance.as_ref().expect("refined level");
        ancestor[l] = ancestor[l + 1]
            .iter()
            .map(|&t| prov[t].parent())
            .collect();
    }
    let mut out = Vec::with_capacity(spaces.len());
    for l in 0..spaces.len() {
        let mut acc = KahanSum::default();
        for tf in 0..n_final {
            let fine = functions[last].local_polynomial(&spaces[last], tf);
            let coarse = functions[l].local_polynomial(&spaces[l], ancestor[l][tf]);
            let det = fine.geom.det.abs();
            for (&q, &w) in rule.points.iter().zip(&rule.weights) {
                let x = fine.geom.to_physical(q);
                let d = fine.hessian(x) - coarse.hessian(x);
                acc.add(
                    w * det
                        * (d[(0, 0)] * d[(0, 0)]
                            + 2.0 * d[(0, 1)] * d[(0, 1)]
                            + d[(1, 1)] * d[(1, 1)]),
                );
            }
        }
        out.push(acc.value().max(0.0).sqrt());
    }
    out
}

fn mg_big_run(bench: BenchmarkId) -> Arc<RunData> {
    let key = format!("mg-big-{bench:?}");
    plain_run(
        &key,
        bench,
        AfemConfig {
            theta: 0.5,
            mode: SpaceMode::Extended,
            solver: SolverChoice::Multigrid,
            smoothing_steps: 1,
            tol: 0.1,
            max_dofs: 200_001,
            max_levels: 100,
            build_hierarchy: true,
        },
        true,
    )
}

fn mg_small_run(bench: BenchmarkId, r: usize) -> Arc<RunData> {
    let key = format!("mg-small-{bench:?}-r{r}");
    plain_run(
        &key,
        bench,
        AfemConfig {
            theta: 0.5,
            mode: SpaceMode::Extended,
            solver: SolverChoice::Multigrid,
            smoothing_steps: r,
            tol: 0.1,
            max_dofs: 30_000,
            max_levels: 100,
            build_hierarchy: true,
        },
        false,
    )
}

fn pcg_run(bench: BenchmarkId) -> Arc<RunData> {
    let key = format!("pcg-{bench:?}");
    plain_run(
        &key,
        bench,
        AfemConfig {
            theta: 0.5,
            mode: SpaceMode::Extended,
            solver: SolverChoice::Pcg,
            smoothing_steps: 1,
            tol: 0.1,
            max_dofs: 100_000,
            max_levels: 100,
            build_hierarchy: true,
        },
        false,
    )
}

fn b3_direct_big() -> Arc<RunData> {
    plain_run(
        "b3-direct-big",
        BenchmarkId::B3,
        AfemConfig {
            theta: 0.5,
            mode: SpaceMode::Extended,
            solver: SolverChoice::Direct,
            max_dofs: 200_001,
            max_levels: 100,
            build_hierarchy: false,
            ..Default::default()
        },
        false,
    )
}

/// B3 multigrid run with per-level contraction measurement, direct-solve
/// oracle and the algebraic estimate of the accepted iterate.
fn b3_sandwich_run() -> Arc<RunData> {
    cached("b3-sandwich", || {
        let benchmark = make_benchmark(BenchmarkId::B3, 0.0);
        let config = AfemConfig {
            theta: 0.5,
            mode: SpaceMode::Extended,
            solver: SolverChoice::Multigrid,
            smoothing_steps: 1,
            tol: 0.1,
            max_dofs: 20_000,
            max_levels: 100,
            build_hierarchy: true,
        };
        let mut sandwich = Vec::new();
        let mut observer = |view: &LevelView<'_>| {
            let h: &Hierarchy = view.hierarchy.expect("hierarchy present");
            let top = h.n_levels() - 1;
            let (c, _) = h.iteration_matrix_norm(top, 1).expect("power iteration");
            let x_exact =
                argyris::assembly::solve_spd(&view.system.a, &view.system.b).expect("direct");
            // the accepted iterate over the free dofs
            let x_tilde: Vec<f64> = view
                .space
                .dofs
                .free_dofs
                .iter()
                .map(|&d| view.u_h.coeffs[d as usize] - view.system.lift.coeffs[d as usize])
                .collect();
            let diff: Vec<f64> = x_tilde
                .iter()
                .zip(&x_exact)
                .map(|(a, b)| a - b)
                .collect();
            let err_sq: f64 = diff
                .iter()
                .zip(&view.system.a.matvec(&diff))
                .map(|(d, ad)| d * ad)
                .sum();
            sandwich.push(SandwichRow {
                n: view.record.n,
                contraction: c,
                eta_alg: view.record.eta_alg.expect("iterative solver"),
                energy_error: err_sq.max(0.0).sqrt(),
            });
        };
        let outcome = afem_loop(&benchmark.problem, &config, Some(&mut observer)).expect("run");
        RunData {
            records: outcome.records,
            sandwich,
            ..Default::default()
        }
    })
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

/// One uniform level = one halving of the mesh size = two bisection sweeps;
/// take every second record so the log-periodic oscillation of the corner
/// singularities does not alias into the least-squares fit.
fn halving_levels(records: &[ConvergenceRecord], max_n: usize) -> Vec<&ConvergenceRecord> {
    records
        .iter()
        .step_by(2)
        .filter(|r| r.n <= max_n && r.error.is_some())
        .collect()
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

/// Uniform-refinement rates: reduced convergence on the square and the
/// L-shape.
#[test]
fn criterion_01_uniform_rates() {
    let b1 = uniform_run(BenchmarkId::B1, 20_000);
    let b2 = uniform_run(BenchmarkId::B2, 100_000);
    // B1: energy identity resolvable in double precision up to ~2.5e4 dofs
    let levels = halving_levels(&b1.records, 25_000);
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .rev()
        .take(5)
        .rev()
        .map(|r| (r.n as f64, r.error.unwrap()))
        .collect();
    let slope_b1 = fit_slope(&pts);
    let levels = halving_levels(&b2.records, 130_000);
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .rev()
        .take(5)
        .rev()
        .map(|r| (r.n as f64, r.error.unwrap()))
        .collect();
    let slope_b2 = fit_slope(&pts);
    let pass = (-1.35..=-1.15).contains(&slope_b1) && (-0.35..=-0.15).contains(&slope_b2);
    report(
        "1",
        pass,
        &format!("uniform slopes: B1 {slope_b1:.3} (target [-1.35,-1.15]), B2 {slope_b2:.3} (target [-0.35,-0.15])"),
    );
}

/// Adaptive optimality for both element spaces: error and estimator decay
/// like N^-2. Errors are measured against the finest solution of the run;
/// the Galerkin property makes the bias fourth order in N_l / N_final.
#[test]
fn criterion_02_adaptive_optimality() {
    let mut detail = String::new();
    let mut pass = true;
    for bench in [BenchmarkId::B1, BenchmarkId::B2, BenchmarkId::B3] {
        for mode in [SpaceMode::Standard, SpaceMode::Extended] {
            let run = adaptive_direct_run(bench, mode, 30_000);
            let n_final = run.records.last().unwrap().n;
            let usable: Vec<usize> = (0..run.records.len())
                .filter(|&l| run.records[l].n * 2 <= n_final)
                .collect();
            let window = &usable[usable.len().saturating_sub(8)..];
            assert!(window.len() >= 8, "need eight usable levels");
            let err_pts: Vec<(f64, f64)> = window
                .iter()
                .map(|&l| (run.records[l].n as f64, run.error_to_final[l]))
                .collect();
            let eta_pts: Vec<(f64, f64)> = window
                .iter()
                .map(|&l| (run.records[l].n as f64, run.records[l].eta))
                .collect();
            let s_err = fit_slope(&err_pts);
            let s_eta = fit_slope(&eta_pts);
            let ok = (-2.2..=-1.8).contains(&s_err) && (-2.2..=-1.8).contains(&s_eta);
            pass &= ok;
            detail.push_str(&format!("{bench:?}/{mode:?}: err {s_err:.2} eta {s_eta:.2}; "));
        }
    }
    report("2", pass, &format!("adaptive slopes (target [-2.2,-1.8]): {detail}"));
}

/// The discrete energies of the uniform runs increase monotonically towards
/// the reference values, with the gap shrinking on every level.
#[test]
fn criterion_03_reference_energies() {
    let mut pass = true;
    let mut detail = String::new();
    for (bench, max_n) in [(BenchmarkId::B1, 20_000), (BenchmarkId::B2, 100_000)] {
        let run = uniform_run(bench, max_n);
        let gaps: Vec<f64> = run
            .records
            .iter()
            .map(|r| {
                let e = r.error.unwrap();
                e * e
            })
            .collect();
        let monotone = gaps.windows(2).all(|w| w[1] < w[0]) && gaps.iter().all(|&g| g > 0.0);
        pass &= monotone;
        detail.push_str(&format!(
            "{bench:?}: gap {:.3e} -> {:.3e} over {} levels, strictly shrinking: {monotone}; ",
            gaps.first().unwrap(),
            gaps.last().unwrap(),
            gaps.len()
        ));
    }
    report("3", pass, &detail);
}

/// Estimator-error equivalence on the slit benchmark.
#[test]
fn criterion_04_estimator_equivalence() {
    let run = b3_direct_big();
    let ratios: Vec<f64> = run
        .records
        .iter()
        .filter(|r| r.n >= 1_000)
        .map(|r| r.eta / r.error.unwrap())
        .collect();
    assert!(ratios.len() >= 10, "need enough levels above N = 1000");
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let pass = max / min < 3.0;
    report(
        "4",
        pass,
        &format!("eta/error in [{min:.2}, {max:.2}], variation {:.2} (target < 3)", max / min),
    );
}

/// Contraction numbers of the V(r)-cycle at the first level beyond 2e5 dofs.
#[test]
fn criterion_05_multigrid_contraction() {
    let bands = [
        (BenchmarkId::B1, 0.9014, 0.05),
        (BenchmarkId::B2, 0.9590, 0.03),
        (BenchmarkId::B3, 0.9339, 0.04),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (bench, center, width) in bands {
        let run = mg_big_run(bench);
        assert!(run.records.last().unwrap().n > 200_000);
        let c1 = run.contraction.iter().find(|(r, _)| *r == 1).unwrap().1;
        let in_band = (c1 - center).abs() <= width;
        let cs: Vec<f64> = run.contraction.iter().map(|&(_, c)| c).collect();
        let monotone = cs.windows(2).all(|w| w[1] < w[0]);
        pass &= in_band && monotone;
        detail.push_str(&format!(
            "{bench:?}: C(r=1) {c1:.4} (target {center}+-{width}), r-sweep {:?} monotone {monotone}; ",
            cs.iter().map(|c| (c * 1e4).round() / 1e4).collect::<Vec<_>>()
        ));
    }
    report("5", pass, &detail);
}

/// Iteration counts: bounded for MG, decreasing with more smoothing, and
/// between one and five for PCG with a single smoothing step.
#[test]
fn criterion_06_iteration_counts() {
    let mut pass = true;
    let mut detail = String::new();
    for bench in [BenchmarkId::B1, BenchmarkId::B2, BenchmarkId::B3] {
        let big = mg_big_run(bench);
        let max_it = big.records.iter().map(|r| r.iterations).max().unwrap();
        let bounded = big.records.iter().all(|r| r.iterations <= 15);
        pass &= bounded;
        // weakly decreasing with the smoothing count
        let mut per_r = Vec::new();
        for r in [1usize, 2, 3, 5] {
            let run = mg_small_run(bench, r);
            per_r.push(run.records.iter().map(|x| x.iterations).max().unwrap());
        }
        let decreasing = per_r.windows(2).all(|w| w[1] <= w[0]);
        pass &= decreasing;
        let pcg = pcg_run(bench);
        let pcg_ok = pcg
            .records
            .iter()
            .all(|r| (1..=5).contains(&r.iterations));
        let pcg_range = (
            pcg.records.iter().map(|r| r.iterations).min().unwrap(),
            pcg.records.iter().map(|r| r.iterations).max().unwrap(),
        );
        pass &= pcg_ok;
        detail.push_str(&format!(
            "{bench:?}: MG max n_it {max_it} (<=15 {bounded}), per-r {per_r:?} decreasing {decreasing}, PCG n_it in {pcg_range:?}; "
        ));
    }
    report("6", pass, &detail);
}

/// Two-sided algebraic-error bound with the measured contraction number.
#[test]
fn criterion_07_algebraic_error_sandwich() {
    let run = b3_sandwich_run();
    assert!(!run.sandwich.is_empty());
    let mut pass = true;
    let mut worst = 0.0f64;
    for row in &run.sandwich {
        if row.n > 20_000 {
            continue;
        }
        let lower = (1.0 - row.contraction).sqrt() * row.energy_error;
        let upper = (1.0 + row.contraction).sqrt() * row.energy_error;
        let ok = lower <= row.eta_alg + 1e-8 && row.eta_alg <= upper + 1e-8;
        pass &= ok;
        let margin = (row.eta_alg / row.energy_error.max(1e-300)
            / (1.0 - row.contraction).sqrt())
        .max((1.0 + row.contraction).sqrt() * row.energy_error / row.eta_alg.max(1e-300));
        worst = worst.max(margin);
        if !ok {
            eprintln!(
                "sandwich violated at N {}: C {:.4}, err {:.3e}, eta_alg {:.3e}",
                row.n, row.contraction, row.energy_error, row.eta_alg
            );
        }
    }
    report(
        "7",
        pass,
        &format!("bound holds on {} levels (N <= 2e4)", run.sandwich.len()),
    );
}

/// The prolongation satisfies the Galerkin identity on every consecutive
/// level pair of the extended runs; the analogous construction for the
/// standard space fails.
#[test]
fn criterion_08_nestedness() {
    let mut pass = true;
    let mut max_dev = 0.0f64;
    let mut pairs = 0usize;
    for run in [
        mg_big_run(BenchmarkId::B1),
        mg_big_run(BenchmarkId::B2),
        mg_big_run(BenchmarkId::B3),
        adaptive_direct_run(BenchmarkId::B1, SpaceMode::Extended, 30_000),
        adaptive_direct_run(BenchmarkId::B2, SpaceMode::Extended, 30_000),
        adaptive_direct_run(BenchmarkId::B3, SpaceMode::Extended, 30_000),
        uniform_run(BenchmarkId::B1, 20_000),
        uniform_run(BenchmarkId::B2, 100_000),
    ] {
        for r in &run.records {
            if let Some(dev) = r.galerkin_deviation {
                pairs += 1;
                max_dev = max_dev.max(dev);
                pass &= dev <= 1e-9;
            }
        }
    }
    assert!(pairs > 40, "expected many level pairs");

    // negative control: the standard space admits no such prolongation
    let coarse_mesh = argyris::driver::domains::square_clamped();
    let coarse = FeSpace::new(coarse_mesh.clone(), SpaceMode::Standard).unwrap();
    let fine_mesh =
        argyris::mesh::refine_nvb(&coarse_mesh, &[0usize].into_iter().collect());
    let fine = FeSpace::new(fine_mesh, SpaceMode::Standard).unwrap();
    let p = argyris::element::standard_injection_attempt(&coarse, &fine).unwrap();
    let a_f = argyris::assembly::assemble_stiffness(&fine);
    let a_c = argyris::assembly::assemble_stiffness(&coarse);
    let pap = p
        .transpose()
        .spgemm(&a_f.spgemm(&p).unwrap())
        .unwrap();
    let std_dev = argyris::sparse::max_abs_diff(&pap, &a_c) / a_c.max_abs();
    pass &= std_dev > 1e-3;
    report(
        "8",
        pass,
        &format!(
            "max Galerkin deviation {max_dev:.2e} over {pairs} extended pairs (<= 1e-9); standard-space deviation {std_dev:.2e} (> 1e-3)"
        ),
    );
}

/// Linear complexity of the iterative solvers, superlinear direct solves.
#[test]
fn criterion_09_time_complexity() {
    let mg = mg_big_run(BenchmarkId::B3);
    let pcg = pcg_run(BenchmarkId::B3);
    let per_iteration = |records: &[ConvergenceRecord]| -> Vec<(f64, f64)> {
        records
            .iter()
            .filter(|r| r.n >= 10_000 && r.iterations > 0)
            .map(|r| (r.n as f64, r.seconds / r.iterations as f64))
            .collect()
    };
    let mg_slope = fit_slope(&per_iteration(&mg.records));
    let pcg_slope = fit_slope(&per_iteration(&pcg.records));
    let direct = b3_direct_big();
    let direct_pts: Vec<(f64, f64)> = direct
        .records
        .iter()
        .filter(|r| r.n >= 10_000)
        .map(|r| (r.n as f64, r.seconds))
        .collect();
    let direct_slope = fit_slope(&direct_pts);
    let pass = (0.85..=1.25).contains(&mg_slope)
        && (0.85..=1.25).contains(&pcg_slope)
        && direct_slope > 1.25;
    report(
        "9",
        pass,
        &format!(
            "per-iteration time slopes: MG {mg_slope:.2}, PCG {pcg_slope:.2} (target [0.85,1.25]); direct total {direct_slope:.2} (target > 1.25)"
        ),
    );
}

/// The pure property suite lives in tests/properties.rs and runs in seconds;
/// this criterion pins the benchmark-free invariants that need mesh grading
/// from real runs: strong grading towards the re-entrant corner.
#[test]
fn criterion_10_mesh_grading_and_properties() {
    // properties are asserted by the dedicated `properties` test target;
    // here: the B2 run grades strongly towards the corner
    let run = adaptive_direct_run(BenchmarkId::B2, SpaceMode::Extended, 30_000);
    assert!(run.records.len() >= 15, "enough levels for the grading check");
    let (min, max) = run.diameter_extremes;
    let ratio = min / max;
    let pass = ratio < 1e-2;
    report(
        "10",
        pass,
        &format!("B2 grading: min/max triangle diameter {ratio:.2e} (target < 1e-2); property suite: see tests/properties.rs"),
    );
}

/// Not a numbered criterion: the adaptive slit run stays optimal for large
/// bulk parameters as well.
#[test]
fn extra_b3_large_theta_stays_optimal() {
    let key = "b3-theta-08";
    let run = plain_run(
        key,
        BenchmarkId::B3,
        AfemConfig {
            theta: 0.8,
            mode: SpaceMode::Extended,
            solver: SolverChoice::Direct,
            max_dofs: 20_000,
            max_levels: 100,
            build_hierarchy: false,
            ..Default::default()
        },
        false,
    );
    let pts: Vec<(f64, f64)> = run
        .records
        .iter()
        .filter(|r| r.n >= 1_000)
        .map(|r| (r.n as f64, r.eta))
        .collect();
    let slope = fit_slope(&pts);
    assert!(
        (-2.3..=-1.7).contains(&slope),
        "estimator slope {slope:.2} for theta = 0.8"
    );
}

/// Not a numbered criterion: the interpolated slit datum pins the origin.
#[test]
fn extra_slit_tip_interpolation() {
    let bench = make_benchmark(BenchmarkId::B3, 0.0);
    let space = FeSpace::new(bench.problem.mesh.clone(), SpaceMode::Extended).unwrap();
    let lift = argyris::element::nodal_interpolate(&space, bench.problem.datum.as_ref());
    // all six dofs at the tip vanish
    let tip = (0..space.mesh.vertices.len())
        .find(|&v| space.mesh.vertices[v].norm() < 1e-14)
        .unwrap();
    let start = space.dofs.vertex_dof_start[tip] as usize;
    for slot in 0..6 {
        assert_eq!(lift.coeffs[start + slot], 0.0);
    }
    let _ = Vec2::zeros();
}
