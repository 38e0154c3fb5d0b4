//! Local multigrid for the hierarchical Argyris space.
//!
//! Every adaptive level contributes one hierarchy level holding the free-dof
//! stiffness matrix, the prolongation from the previous level, the set of
//! new dofs and the lower-triangular smoother factor. The V(r)-cycle applies
//! a forward Gauß-Seidel sweep restricted to the new dofs, recurses through
//! the prolongation and finishes with the transposed sweep, with an exact
//! (dense) solve on the coarsest level. The resulting operator B is a
//! symmetric approximate inverse: MG iterations, PCG preconditioning, the
//! algebraic error estimate sqrt(r^T B r) and the contraction-number
//! measurement all reuse it.

use crate::element::{prolongation_matrix, ElementError, FeSpace, SpaceMode};
use crate::mesh::Provenance;
use crate::sparse::{max_abs_diff, CsrMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug)]
pub enum MultilevelError {
    EmptyHierarchy,
    NonConsecutiveLevels { coarse: usize, fine: usize },
    StandardMode,
    NotSpd(String),
    Diverged { iterations: usize },
    PowerIterationStalled,
    Element(ElementError),
}

impl std::fmt::Display for MultilevelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MultilevelError::EmptyHierarchy => write!(f, "hierarchy has no levels"),
            MultilevelError::NonConsecutiveLevels { coarse, fine } => {
                write!(f, "levels {coarse} and {fine} are not consecutive")
            }
            MultilevelError::StandardMode => {
                write!(f, "multilevel solvers require the extended space")
            }
            MultilevelError::NotSpd(msg) => write!(f, "matrix is not positive definite: {msg}"),
            MultilevelError::Diverged { iterations } => {
                write!(f, "algebraic estimate grew for three consecutive iterations (iteration {iterations})")
            }
            MultilevelError::PowerIterationStalled => {
                write!(f, "power iteration did not converge within 10^4 steps")
            }
            MultilevelError::Element(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for MultilevelError {}

impl From<ElementError> for MultilevelError {
    fn from(e: ElementError) -> Self {
        MultilevelError::Element(e)
    }
}

/// One level of the multigrid hierarchy (free dofs only).
pub struct LevelData {
    pub a: CsrMatrix,
    pub b: Vec<f64>,
    /// Prolongation from the previous level; absent on level 0.
    pub p: Option<CsrMatrix>,
    /// Free dofs whose basis functions are new on this level.
    pub new_dofs: Vec<u32>,
    /// Lower triangle (with diagonal) of A restricted to the new dofs.
    pub smoother: Option<CsrMatrix>,
    /// Dense factorization of the coarsest matrix.
    pub coarse_factor: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
    /// Relative max-norm deviation of P^T A P from the previous-level matrix.
    pub galerkin_deviation: Option<f64>,
}

/// Free dofs of the fine level whose basis functions are not contained in
/// the coarse space: all dofs of new nodes plus dofs of old nodes whose
/// support meets a bisected triangle.
pub fn new_dof_set(fine: &FeSpace, coarse: &FeSpace) -> Result<Vec<u32>, MultilevelError> {
    if fine.mesh.level != coarse.mesh.level + 1 {
        return Err(MultilevelError::NonConsecutiveLevels {
            coarse: coarse.mesh.level,
            fine: fine.mesh.level,
        });
    }
    let provenance = fine.mesh.provenance.as_ref().expect("refined mesh");
    let mut vertex_touched = vec![false; fine.mesh.vertices.len()];
    let mut edge_touched = vec![false; fine.topo.edges.len()];
    for (t, p) in provenance.iter().enumerate() {
        if matches!(p, Provenance::Child(_)) {
            for &v in &fine.mesh.triangles[t].v {
                vertex_touched[v] = true;
            }
            for &e in &fine.topo.tri_edges[t] {
                edge_touched[e] = true;
            }
        }
    }
    let mut set = Vec::new();
    for (k, &d) in fine.dofs.free_dofs.iter().enumerate() {
        let touched = match fine.dofs.dofs[d as usize].node {
            crate::element::DofNode::Vertex(v) => vertex_touched[v],
            crate::element::DofNode::Edge(e) => edge_touched[e],
        };
        if touched {
            set.push(k as u32);
        }
    }
    Ok(set)
}

/// Growing sequence of levels; append-only as the adaptive loop refines.
pub struct Hierarchy {
    pub levels: Vec<LevelData>,
}

impl Default for Hierarchy {
    fn default() -> Self {
        Self::new()
    }
}

/// Result of an iterative solve.
pub struct IterativeSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Algebraic estimate per iterate, starting with the initial guess.
    pub eta_alg: Vec<f64>,
}

impl Hierarchy {
    pub fn new() -> Self {
        Hierarchy { levels: Vec::new() }
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Append a level. `prev` must be the space of the current top level.
    /// Returns the Galerkin deviation of the new prolongation (absent on
    /// level 0).
    pub fn push_level(
        &mut self,
        fine: &FeSpace,
        prev: Option<&FeSpace>,
        a: CsrMatrix,
        b: Vec<f64>,
    ) -> Result<Option<f64>, MultilevelError> {
        if fine.mode() != SpaceMode::Extended {
            return Err(MultilevelError::StandardMode);
        }
        match prev {
            None => {
                assert!(self.levels.is_empty(), "level 0 must come first");
                let dense = a.to_dense();
                let factor = dense
                    .cholesky()
                    .ok_or_else(|| MultilevelError::NotSpd("coarsest level".into()))?;
                self.levels.push(LevelData {
                    a,
                    b,
                    p: None,
                    new_dofs: Vec::new(),
                    smoother: None,
                    coarse_factor: Some(factor),
                    galerkin_deviation: None,
                });
                Ok(None)
            }
            Some(coarse) => {
                let p_full = prolongation_matrix(coarse, fine)?;
                let p = p_full.restrict(&fine.dofs.free_dofs, &coarse.dofs.free_dofs);
                let new_dofs = new_dof_set(fine, coarse)?;
                let smoother = a.tril_submatrix(&new_dofs);
                for i in 0..smoother.nrows {
                    if smoother.get(i, i) == 0.0 {
                        return Err(MultilevelError::NotSpd(format!(
                            "zero diagonal at new dof {i}"
                        )));
                    }
                }
                let coarse_a = &self.levels.last().ok_or(MultilevelError::EmptyHierarchy)?.a;
                let pap = p
                    .transpose()
                    .spgemm(&a.spgemm(&p).expect("shapes agree"))
                    .expect("shapes agree");
                let dev = max_abs_diff(&pap, coarse_a) / coarse_a.max_abs().max(1e-300);
                self.levels.push(LevelData {
                    a,
                    b,
                    p: Some(p),
                    new_dofs,
                    smoother: Some(smoother),
                    coarse_factor: None,
                    galerkin_deviation: Some(dev),
                });
                Ok(Some(dev))
            }
        }
    }

    /// Local Gauß-Seidel smoother: forward substitution with the lower
    /// triangle of A restricted to the new dofs, zero elsewhere.
    pub fn smooth(&self, level: usize, y: &[f64]) -> Vec<f64> {
        self.smooth_impl(level, y, false)
    }

    /// Transposed smoother (backward substitution) for post-smoothing.
    pub fn smooth_transpose(&self, level: usize, y: &[f64]) -> Vec<f64> {
        self.smooth_impl(level, y, true)
    }

    fn smooth_impl(&self, level: usize, y: &[f64], transpose: bool) -> Vec<f64> {
        let data = &self.levels[level];
        let idx = &data.new_dofs;
        let tril = data.smoother.as_ref().expect("smoother on level > 0");
        let mut local: Vec<f64> = idx.iter().map(|&j| y[j as usize]).collect();
        if transpose {
            tril.backward_substitute_transpose(&mut local);
        } else {
            tril.forward_substitute(&mut local);
        }
        let mut out = vec![0.0; y.len()];
        for (k, &j) in idx.iter().enumerate() {
            out[j as usize] = local[k];
        }
        out
    }

    /// Action of the V(r)-cycle operator B_level on a vector.
    pub fn vcycle(&self, level: usize, y: &[f64], r: usize) -> Vec<f64> {
        let data = &self.levels[level];
        if level == 0 {
            let rhs = nalgebra::DVector::from_column_slice(y);
            return data
                .coarse_factor
                .as_ref()
                .expect("coarsest factorization")
                .solve(&rhs)
                .as_slice()
                .to_vec();
        }
        let n = data.a.nrows;
        let mut w = vec![0.0; n];
        let mut residual = vec![0.0; n];
        let defect = |w: &[f64], residual: &mut [f64]| {
            data.a.matvec_into(w, residual);
            for (res, &yv) in residual.iter_mut().zip(y) {
                *res = yv - *res;
            }
        };
        for _ in 0..r {
            defect(&w, &mut residual);
            let s = self.smooth(level, &residual);
            for (wv, sv) in w.iter_mut().zip(&s) {
                *wv += sv;
            }
        }
        defect(&w, &mut residual);
        let p = data.p.as_ref().expect("prolongation on level > 0");
        let mut coarse_rhs = vec![0.0; p.ncols];
        p.matvec_transpose_add(&residual, &mut coarse_rhs);
        let coarse = self.vcycle(level - 1, &coarse_rhs, r);
        let lifted = p.matvec(&coarse);
        for (wv, lv) in w.iter_mut().zip(&lifted) {
            *wv += lv;
        }
        for _ in 0..r {
            defect(&w, &mut residual);
            let s = self.smooth_transpose(level, &residual);
            for (wv, sv) in w.iter_mut().zip(&s) {
                *wv += sv;
            }
        }
        w
    }

    /// B applied on the finest level.
    pub fn apply_preconditioner(&self, y: &[f64], r: usize) -> Vec<f64> {
        self.vcycle(self.levels.len() - 1, y, r)
    }

    fn top(&self) -> Result<&LevelData, MultilevelError> {
        self.levels.last().ok_or(MultilevelError::EmptyHierarchy)
    }

    /// Multigrid iteration x <- x + B(b - Ax) until the algebraic estimate
    /// sqrt(r^T B r) of the iterate drops below tol times the estimate of
    /// the initial guess. The update B r doubles as the estimator, so no
    /// extra cycle is spent on the stopping test.
    pub fn mg_solve(
        &self,
        b: &[f64],
        tol: f64,
        r: usize,
        x0: &[f64],
    ) -> Result<IterativeSolution, MultilevelError> {
        let top = self.top()?;
        let n = top.a.nrows;
        let mut x = x0.to_vec();
        let mut residual = vec![0.0; n];
        let mut eta_alg = Vec::new();
        let mut grew = 0usize;
        let mut iterations = 0usize;
        loop {
            top.a.matvec_into(&x, &mut residual);
            for (res, &bv) in residual.iter_mut().zip(b) {
                *res = bv - *res;
            }
            let update = self.apply_preconditioner(&residual, r);
            let eta_sq: f64 = residual.iter().zip(&update).map(|(a, b)| a * b).sum();
            if eta_sq < 0.0 {
                return Err(MultilevelError::NotSpd(format!(
                    "negative algebraic estimate {eta_sq:.3e}"
                )));
            }
            let eta = eta_sq.sqrt();
            if let Some(&prev) = eta_alg.last() {
                if eta > prev {
                    grew += 1;
                    if grew >= 3 {
                        return Err(MultilevelError::Diverged { iterations });
                    }
                } else {
                    grew = 0;
                }
            }
            eta_alg.push(eta);
            if eta == 0.0 || eta < tol * eta_alg[0] {
                break;
            }
            for (xv, uv) in x.iter_mut().zip(&update) {
                *xv += uv;
            }
            iterations += 1;
            if iterations > 10_000 {
                return Err(MultilevelError::Diverged { iterations });
            }
        }
        Ok(IterativeSolution {
            x,
            iterations,
            eta_alg,
        })
    }

    /// Preconditioned conjugate gradients with the V(r)-cycle as
    /// preconditioner and the same relative stopping rule, evaluated with
    /// the scalar r^T z of each iteration.
    pub fn pcg_solve(
        &self,
        b: &[f64],
        tol: f64,
        r: usize,
        x0: &[f64],
    ) -> Result<IterativeSolution, MultilevelError> {
        let top = self.top()?;
        let _n = top.a.nrows;
        let mut x = x0.to_vec();
        let mut residual = top.a.matvec(&x);
        for (res, &bv) in residual.iter_mut().zip(b) {
            *res = bv - *res;
        }
        let mut z = self.apply_preconditioner(&residual, r);
        let mut rho: f64 = residual.iter().zip(&z).map(|(a, b)| a * b).sum();
        if rho < 0.0 {
            return Err(MultilevelError::NotSpd("preconditioner".into()));
        }
        let eta0 = rho.sqrt();
        let mut eta_alg = vec![eta0];
        if eta0 == 0.0 {
            return Ok(IterativeSolution {
                x,
                iterations: 0,
                eta_alg,
            });
        }
        let mut p = z.clone();
        let mut iterations = 0usize;
        let mut grew = 0usize;
        loop {
            let ap = top.a.matvec(&p);
            let curvature: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if curvature <= 0.0 {
                return Err(MultilevelError::NotSpd(format!(
                    "nonpositive curvature {curvature:.3e}"
                )));
            }
            let alpha = rho / curvature;
            for ((xv, pv), (rv, apv)) in x
                .iter_mut()
                .zip(&p)
                .zip(residual.iter_mut().zip(&ap))
            {
                *xv += alpha * pv;
                *rv -= alpha * apv;
            }
            iterations += 1;
            z = self.apply_preconditioner(&residual, r);
            let rho_next: f64 = residual.iter().zip(&z).map(|(a, b)| a * b).sum();
            if rho_next < 0.0 {
                return Err(MultilevelError::NotSpd("preconditioner".into()));
            }
            let eta = rho_next.sqrt();
            if let Some(&prev) = eta_alg.last() {
                if eta > prev {
                    grew += 1;
                    if grew >= 3 {
                        return Err(MultilevelError::Diverged { iterations });
                    }
                } else {
                    grew = 0;
                }
            }
            eta_alg.push(eta);
            if eta < tol * eta0 || iterations > 10_000 {
                if iterations > 10_000 {
                    return Err(MultilevelError::Diverged { iterations });
                }
                break;
            }
            let beta = rho_next / rho;
            for (pv, zv) in p.iter_mut().zip(&z) {
                *pv = zv + beta * *pv;
            }
            rho = rho_next;
        }
        Ok(IterativeSolution {
            x,
            iterations,
            eta_alg,
        })
    }

    /// Spectral energy norm of I - B A on the given level by power iteration
    /// in the A-inner product; also returns c = C / (1 - C).
    pub fn iteration_matrix_norm(
        &self,
        level: usize,
        r: usize,
    ) -> Result<(f64, f64), MultilevelError> {
        let data = &self.levels[level];
        let n = data.a.nrows;
        if level == 0 || n == 0 {
            return Ok((0.0, 0.0));
        }
        let apply_e = |y: &[f64]| -> Vec<f64> {
            let ay = data.a.matvec(y);
            let bay = self.vcycle(level, &ay, r);
            y.iter().zip(&bay).map(|(a, b)| a - b).collect()
        };
        let a_dot = |u: &[f64], v: &[f64]| -> f64 {
            let av = data.a.matvec(v);
            u.iter().zip(&av).map(|(a, b)| a * b).sum()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        let mut y: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let norm = a_dot(&y, &y).sqrt();
        for v in &mut y {
            *v /= norm;
        }
        let mut lambda_prev = f64::INFINITY;
        for _ in 0..10_000 {
            let ey = apply_e(&y);
            let lambda = a_dot(&ey, &y);
            let norm = a_dot(&ey, &ey).sqrt();
            if norm < 1e-14 {
                // contraction is numerically zero (exact solver)
                return Ok((0.0, 0.0));
            }
            let next: Vec<f64> = ey.iter().map(|v| v / norm).collect();
            if (lambda - lambda_prev).abs() <= 1e-4 * lambda.abs() {
                let c_norm = lambda.max(0.0);
                return Ok((c_norm, c_norm / (1.0 - c_norm)));
            }
            lambda_prev = lambda;
            y = next;
        }
        Err(MultilevelError::PowerIterationStalled)
    }
}
