//! Bulk marking of minimal cardinality and the adaptive refinement loop.

use crate::assembly::{
    energy_norm_sq, solve_spd, AssemblyError, EnergyRef, LinearSystem,
};
use crate::element::{ElementError, FeFunction, FeSpace, SpaceMode, SpaceError};
use crate::estimator::{estimate, oscillation_f, IndicatorField};
use crate::mesh::{refine_nvb, MeshError, TriId, Triangulation};
use crate::multilevel::{Hierarchy, MultilevelError};
use crate::problem::{BoundaryDatum, SourceTerm};
use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

/// Linear solver used in the Solve step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    Direct,
    Multigrid,
    Pcg,
}

/// Parameters of the adaptive loop.
#[derive(Clone, Debug)]
pub struct AfemConfig {
    /// Bulk parameter in (0, 1].
    pub theta: f64,
    pub mode: SpaceMode,
    pub solver: SolverChoice,
    /// Pre- and post-smoothing steps of the V-cycle.
    pub smoothing_steps: usize,
    /// Relative tolerance of the algebraic stopping criterion.
    pub tol: f64,
    /// Stop once the number of free dofs reaches this bound.
    pub max_dofs: usize,
    /// Stop after this many levels.
    pub max_levels: usize,
    /// Keep a multigrid hierarchy even for direct solves (extended mode).
    pub build_hierarchy: bool,
}

impl Default for AfemConfig {
    fn default() -> Self {
        AfemConfig {
            theta: 0.5,
            mode: SpaceMode::Extended,
            solver: SolverChoice::Direct,
            smoothing_steps: 1,
            tol: 0.1,
            max_dofs: 10_000,
            max_levels: 100,
            build_hierarchy: true,
        }
    }
}

impl AfemConfig {
    pub fn validate(&self) -> Result<(), AfemError> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(AfemError::Config("theta must lie in (0, 1]".into()));
        }
        if self.smoothing_steps == 0 {
            return Err(AfemError::Config("smoothing steps must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(AfemError::Config("tol must lie in (0, 1)".into()));
        }
        if self.solver != SolverChoice::Direct && self.mode != SpaceMode::Extended {
            return Err(AfemError::Config(
                "multigrid and PCG require the extended space (the standard space is not nested)"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Problem instance for the loop.
pub struct ProblemSetup {
    pub mesh: Triangulation,
    pub source: SourceTerm,
    pub datum: Arc<dyn BoundaryDatum>,
    /// Energy error against a known reference, when available.
    pub reference_error: Option<Arc<dyn Fn(&FeSpace, &FeFunction) -> f64 + Send + Sync>>,
}

/// One row of the convergence history.
#[derive(Clone, Debug)]
pub struct ConvergenceRecord {
    pub level: usize,
    /// Free dofs.
    pub n: usize,
    pub error: Option<f64>,
    pub eta: f64,
    pub osc_f: f64,
    pub osc_g: f64,
    /// Solver iterations (0 for the direct solver).
    pub iterations: usize,
    /// Algebraic estimate at acceptance (iterative solvers only).
    pub eta_alg: Option<f64>,
    /// Wall-clock seconds of the Solve step.
    pub seconds: f64,
    /// Relative deviation of P^T A P from the coarse matrix (hierarchy runs).
    pub galerkin_deviation: Option<f64>,
    /// Number of marked triangles.
    pub marked: usize,
}

#[derive(Debug)]
pub enum AfemError {
    Config(String),
    Mesh(MeshError),
    Space(SpaceError),
    Assembly { level: usize, source: AssemblyError },
    Multilevel { level: usize, source: MultilevelError },
}

impl std::fmt::Display for AfemError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AfemError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            AfemError::Mesh(e) => write!(f, "{e}"),
            AfemError::Space(e) => write!(f, "{e}"),
            AfemError::Assembly { level, source } => write!(f, "level {level}: {source}"),
            AfemError::Multilevel { level, source } => write!(f, "level {level}: {source}"),
        }
    }
}

impl std::error::Error for AfemError {}

impl From<MeshError> for AfemError {
    fn from(e: MeshError) -> Self {
        AfemError::Mesh(e)
    }
}

impl From<SpaceError> for AfemError {
    fn from(e: SpaceError) -> Self {
        AfemError::Space(e)
    }
}

impl From<ElementError> for AfemError {
    fn from(e: ElementError) -> Self {
        AfemError::Space(SpaceError::Element(e))
    }
}

/// Minimal set S with theta * sum(eta^2) <= sum_{T in S} eta^2(T), by
/// expected-linear-time selection (recursive three-way partition around a
/// median-of-three pivot instead of a full sort). Ties are broken towards
/// smaller triangle ids, which makes the minimal set lexicographically
/// smallest.
pub fn doerfler_mark(indicators_sq: &[f64], theta: f64) -> Vec<TriId> {
    let total: f64 = indicators_sq.iter().sum();
    let goal = theta * total;
    if goal <= 0.0 {
        return Vec::new();
    }
    let mut items: Vec<u32> = (0..indicators_sq.len() as u32).collect();
    let mut out: Vec<TriId> = Vec::new();
    select(indicators_sq, &mut items, goal, &mut out);
    out.sort_unstable();
    out
}

/// Order: larger value first, smaller id first among equal values.
#[inline]
fn before(values: &[f64], a: u32, b: u32) -> bool {
    let (va, vb) = (values[a as usize], values[b as usize]);
    va > vb || (va == vb && a < b)
}

fn select(values: &[f64], items: &mut [u32], goal: f64, out: &mut Vec<TriId>) {
    debug_assert!(goal > 0.0);
    if items.len() <= 8 {
        items.sort_unstable_by(|&a, &b| {
            values[b as usize]
                .partial_cmp(&values[a as usize])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut acc = 0.0;
        for &i in items.iter() {
            out.push(i as TriId);
            acc += values[i as usize];
            if acc >= goal {
                return;
            }
        }
        return;
    }
    // median-of-three pivot
    let (a, b, c) = (items[0], items[items.len() / 2], items[items.len() - 1]);
    let pivot = {
        let mut trio = [a, b, c];
        trio.sort_unstable_by(|&x, &y| {
            if before(values, x, y) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        trio[1]
    };
    // three-way partition: strictly before pivot, equal to pivot, after
    let mut high: Vec<u32> = Vec::new();
    let mut equal: Vec<u32> = Vec::new();
    let mut low: Vec<u32> = Vec::new();
    for &i in items.iter() {
        if i == pivot {
            equal.push(i);
        } else if before(values, i, pivot) {
            high.push(i);
        } else {
            low.push(i);
        }
    }
    let sum_high: f64 = high.iter().map(|&i| values[i as usize]).sum();
    if sum_high >= goal {
        select(values, &mut high, goal, out);
        return;
    }
    out.extend(high.iter().map(|&i| i as TriId));
    let mut acc = sum_high;
    for &i in &equal {
        out.push(i as TriId);
        acc += values[i as usize];
        if acc >= goal {
            return;
        }
    }
    select(values, &mut low, goal - acc, out);
}

/// Everything the observer callback can inspect after the Estimate step of
/// one level.
pub struct LevelView<'a> {
    pub level: usize,
    pub space: &'a FeSpace,
    pub system: &'a LinearSystem,
    pub u_h: &'a FeFunction,
    pub indicators: &'a IndicatorField,
    pub marked: &'a [TriId],
    pub hierarchy: Option<&'a Hierarchy>,
    pub record: &'a ConvergenceRecord,
}

/// Output of the adaptive loop.
pub struct AfemOutcome {
    pub records: Vec<ConvergenceRecord>,
    pub hierarchy: Option<Hierarchy>,
    pub final_mesh: Triangulation,
}

/// Threshold of the zero-estimator guard.
fn estimator_is_zero(eta: f64, energy_sq: f64) -> bool {
    eta < 1e-12 * (1.0 + energy_sq.sqrt())
}

/// Solve-Estimate-Mark-Refine until a stopping rule fires.
pub fn afem_loop(
    problem: &ProblemSetup,
    config: &AfemConfig,
    mut observer: Option<&mut dyn FnMut(&LevelView<'_>)>,
) -> Result<AfemOutcome, AfemError> {
    config.validate()?;
    if !problem.source.compatible_with(&problem.mesh) {
        return Err(AfemError::Config(
            "point loads must sit on vertices of the initial triangulation".into(),
        ));
    }
    let mut mesh = problem.mesh.clone();
    let mut records: Vec<ConvergenceRecord> = Vec::new();
    let mut hierarchy: Option<Hierarchy> = None;
    let mut prev: Option<(FeSpace, Vec<f64>)> = None;
    let keep_hierarchy = config.mode == SpaceMode::Extended
        && (config.build_hierarchy || config.solver != SolverChoice::Direct);

    for level in 0..config.max_levels {
        let space = FeSpace::new(mesh.clone(), config.mode)?;
        let (system, _a_full) = LinearSystem::build(&space, &problem.source, problem.datum.as_ref())
            .map_err(|source| AfemError::Assembly { level, source })?;

        let mut galerkin_deviation = None;
        if keep_hierarchy {
            let h = hierarchy.get_or_insert_with(Hierarchy::new);
            galerkin_deviation = h
                .push_level(
                    &space,
                    prev.as_ref().map(|(s, _)| s),
                    system.a.clone(),
                    system.b.clone(),
                )
                .map_err(|source| AfemError::Multilevel { level, source })?;
        }

        // Solve
        let start = Instant::now();
        let (x, iterations, eta_alg) = match config.solver {
            SolverChoice::Direct => {
                let x = solve_spd(&system.a, &system.b)
                    .map_err(|source| AfemError::Assembly { level, source })?;
                (x, 0, None)
            }
            SolverChoice::Multigrid | SolverChoice::Pcg => {
                let h = hierarchy.as_ref().expect("hierarchy for iterative solver");
                let x0 = match &prev {
                    Some((_, x_prev)) => h
                        .levels
                        .last()
                        .unwrap()
                        .p
                        .as_ref()
                        .expect("prolongation on refined level")
                        .matvec(x_prev),
                    None => vec![0.0; system.b.len()],
                };
                let sol = if config.solver == SolverChoice::Multigrid {
                    h.mg_solve(&system.b, config.tol, config.smoothing_steps, &x0)
                } else {
                    h.pcg_solve(&system.b, config.tol, config.smoothing_steps, &x0)
                }
                .map_err(|source| AfemError::Multilevel { level, source })?;
                let eta_final = sol.eta_alg.last().copied();
                (sol.x, sol.iterations, eta_final)
            }
        };
        let seconds = start.elapsed().as_secs_f64();
        let mut full = space.dofs.scatter_free(&x);
        for (c, l) in full.iter_mut().zip(&system.lift.coeffs) {
            *c += l;
        }
        let u_h = FeFunction::from_coeffs(full);

        // Estimate
        let indicators = estimate(&space, &u_h, &problem.source, problem.datum.as_ref())
            .map_err(|source| AfemError::Assembly { level, source })?;
        let eta = indicators.eta();
        let osc_f_val = oscillation_f(&space, &problem.source.smooth);
        let osc_g_val: f64 = {
            let all: Vec<usize> = (0..space.topo.edges.len())
                .filter(|&e| space.topo.edges[e].is_boundary())
                .collect();
            crate::estimator::boundary_osc(&space, &all, problem.datum.as_ref())
                .iter()
                .map(|o| o.total())
                .sum::<f64>()
                .sqrt()
        };
        let error = problem
            .reference_error
            .as_ref()
            .map(|f| f(&space, &u_h));

        // Mark
        let marked = doerfler_mark(&indicators.values_sq(), config.theta);

        let record = ConvergenceRecord {
            level,
            n: space.n_free(),
            error,
            eta,
            osc_f: osc_f_val,
            osc_g: osc_g_val,
            iterations,
            eta_alg,
            seconds,
            galerkin_deviation,
            marked: marked.len(),
        };
        if let Some(obs) = observer.as_deref_mut() {
            obs(&LevelView {
                level,
                space: &space,
                system: &system,
                u_h: &u_h,
                indicators: &indicators,
                marked: &marked,
                hierarchy: hierarchy.as_ref(),
                record: &record,
            });
        }
        records.push(record);

        // Stopping rules
        let energy_sq = energy_norm_sq(&space, &u_h, EnergyRef::Zero)
            .map_err(|source| AfemError::Assembly { level, source })?;
        if estimator_is_zero(eta, energy_sq)
            || space.n_free() >= config.max_dofs
            || marked.is_empty()
            || level + 1 == config.max_levels
        {
            return Ok(AfemOutcome {
                records,
                hierarchy,
                final_mesh: space.mesh.clone(),
            });
        }

        // Refine
        let marked_set: BTreeSet<TriId> = marked.iter().copied().collect();
        mesh = refine_nvb(&space.mesh, &marked_set);
        prev = Some((space, x));
    }
    let final_mesh = prev
        .map(|(s, _)| s.mesh)
        .unwrap_or_else(|| problem.mesh.clone());
    Ok(AfemOutcome {
        records,
        hierarchy,
        final_mesh,
    })
}
