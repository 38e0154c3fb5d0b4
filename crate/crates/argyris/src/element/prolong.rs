//! Prolongation between nested extended Argyris spaces.
//!
//! Column k of the prolongation matrix holds the fine dof values of the k-th
//! coarse basis function, so the matrix expresses any coarse function in the
//! fine basis exactly. Fine dofs are evaluated on the coarse element that
//! contains the supporting fine triangle; split dofs pick the fine triangle
//! on their side of the bisected edge, all other dofs are single valued for
//! C^1 functions and any adjacent element works.

use super::dofmap::{DofKind, DofNode};
use super::function::LocalPolynomial;
use super::reference::{reference, N_LOCAL_DOFS};
use super::{ElementError, FeFunction, FeSpace, SpaceMode};
use crate::mesh::TriId;
use crate::poly::Poly5;
use crate::sparse::CsrMatrix;
use crate::Vec2;

/// Prolongation over all dofs (constrained included):
/// fine_coeffs = P * coarse_coeffs represents the identical function.
pub fn prolongation_matrix(
    coarse: &FeSpace,
    fine: &FeSpace,
) -> Result<CsrMatrix, ElementError> {
    if coarse.mode() != SpaceMode::Extended || fine.mode() != SpaceMode::Extended {
        return Err(ElementError::StandardModeProlongation);
    }
    if fine.mesh.level != coarse.mesh.level + 1 {
        return Err(ElementError::LevelMismatch {
            coarse: coarse.mesh.level,
            fine: fine.mesh.level,
        });
    }
    build_matrix(coarse, fine, false)
}

/// Same construction with one-sided evaluations replaced by an arbitrary
/// side. For the standard space this is the (generally failing) attempt at a
/// coarse-to-fine injection; exposed for the negative nestedness check.
pub fn standard_injection_attempt(
    coarse: &FeSpace,
    fine: &FeSpace,
) -> Result<CsrMatrix, ElementError> {
    if fine.mesh.level != coarse.mesh.level + 1 {
        return Err(ElementError::LevelMismatch {
            coarse: coarse.mesh.level,
            fine: fine.mesh.level,
        });
    }
    build_matrix(coarse, fine, true)
}

fn build_matrix(
    coarse: &FeSpace,
    fine: &FeSpace,
    ignore_sides: bool,
) -> Result<CsrMatrix, ElementError> {
    let provenance = fine
        .mesh
        .provenance
        .as_ref()
        .expect("level > 0 has provenance");

    // first adjacent fine triangle per vertex, and one per side of the
    // zeta direction (for split dofs)
    let nv = fine.mesh.vertices.len();
    let mut any_tri = vec![usize::MAX; nv];
    let mut plus_tri = vec![usize::MAX; nv];
    let mut minus_tri = vec![usize::MAX; nv];
    for (t, tri) in fine.mesh.triangles.iter().enumerate() {
        let centroid = fine.mesh.centroid(t);
        for &v in &tri.v {
            if any_tri[v] == usize::MAX {
                any_tri[v] = t;
            }
            let side = (centroid - fine.mesh.vertices[v]).dot(&fine.frames.zeta[v]);
            if side > 0.0 {
                if plus_tri[v] == usize::MAX {
                    plus_tri[v] = t;
                }
            } else if minus_tri[v] == usize::MAX {
                minus_tri[v] = t;
            }
        }
    }

    // coarse local basis in monomial form, built lazily per coarse triangle
    let mut coarse_basis: Vec<Option<Box<[Poly5; N_LOCAL_DOFS]>>> =
        (0..coarse.mesh.triangles.len()).map(|_| None).collect();
    let re = reference();
    let mut triplets: Vec<(u32, u32, f64)> = Vec::new();

    for (d, dof) in fine.dofs.dofs.iter().enumerate() {
        // node position, fine triangle carrying the evaluation, directions
        let (point, fine_tri, dirs): (Vec2, TriId, Dirs) = match dof.node {
            DofNode::Vertex(v) => {
                let t = match dof.kind {
                    DofKind::DZetaZetaPlus if !ignore_sides => plus_tri[v],
                    DofKind::DZetaZetaMinus if !ignore_sides => minus_tri[v],
                    _ => any_tri[v],
                };
                debug_assert!(t != usize::MAX, "no adjacent triangle on required side");
                let (xi, zeta) = (fine.frames.xi[v], fine.frames.zeta[v]);
                let dirs = match dof.kind {
                    DofKind::Value => Dirs::None,
                    DofKind::DXi => Dirs::One(xi),
                    DofKind::DZeta => Dirs::One(zeta),
                    DofKind::DXiXi => Dirs::Two(xi, xi),
                    DofKind::DXiZeta => Dirs::Two(xi, zeta),
                    DofKind::DZetaZeta
                    | DofKind::DZetaZetaPlus
                    | DofKind::DZetaZetaMinus => Dirs::Two(zeta, zeta),
                    DofKind::EdgeNormal => unreachable!(),
                };
                (fine.mesh.vertices[v], t, dirs)
            }
            DofNode::Edge(e) => {
                let edge = &fine.topo.edges[e];
                (edge.midpoint, edge.tri_plus, Dirs::One(edge.normal))
            }
        };
        let coarse_tri = provenance[fine_tri].parent();
        let basis = coarse_basis[coarse_tri].get_or_insert_with(|| {
            let m = &coarse.dofs.transforms[coarse_tri];
            let mut b: Box<[Poly5; N_LOCAL_DOFS]> = Box::new([Poly5::zero(); N_LOCAL_DOFS]);
            for j in 0..N_LOCAL_DOFS {
                for k in 0..N_LOCAL_DOFS {
                    let m_kj = m[(k, j)];
                    if m_kj != 0.0 {
                        b[j].add_scaled(&re.basis[k], m_kj);
                    }
                }
            }
            b
        });
        let geom = coarse.geometry(coarse_tri);
        let xhat = geom.to_reference(point);
        for j in 0..N_LOCAL_DOFS {
            let val = match dirs {
                Dirs::None => basis[j].eval(xhat),
                Dirs::One(a) => basis[j].deriv_dir(geom.pull_direction(a)).eval(xhat),
                Dirs::Two(a, b) => basis[j]
                    .deriv_dir(geom.pull_direction(a))
                    .deriv_dir(geom.pull_direction(b))
                    .eval(xhat),
            };
            if val != 0.0 {
                triplets.push((d as u32, coarse.dofs.tri_dofs[coarse_tri][j], val));
            }
        }
    }
    let mut p = CsrMatrix::from_triplets(fine.n_dofs(), coarse.n_dofs(), &mut triplets);
    drop_noise(&mut p);
    Ok(p)
}

enum Dirs {
    None,
    One(Vec2),
    Two(Vec2, Vec2),
}

/// Remove entries that are pure round-off so the matrix keeps the sparsity
/// of the exact prolongation.
fn drop_noise(p: &mut CsrMatrix) {
    let scale = p.max_abs();
    let cutoff = scale * 1e-13;
    let mut indptr = vec![0usize; p.nrows + 1];
    let mut indices = Vec::with_capacity(p.indices.len());
    let mut data = Vec::with_capacity(p.data.len());
    for i in 0..p.nrows {
        let (cols, vals) = p.row(i);
        for (c, v) in cols.iter().zip(vals) {
            if v.abs() > cutoff {
                indices.push(*c);
                data.push(*v);
            }
        }
        indptr[i + 1] = indices.len();
    }
    p.indptr = indptr;
    p.indices = indices;
    p.data = data;
}

/// Express a coarse function in the fine space; the result evaluates
/// pointwise identically.
pub fn prolong_coefficients(
    coarse: &FeSpace,
    f: &FeFunction,
    fine: &FeSpace,
) -> Result<FeFunction, ElementError> {
    let p = prolongation_matrix(coarse, fine)?;
    Ok(FeFunction::from_coeffs(p.matvec(&f.coeffs)))
}

/// Evaluate a coarse function on the fine mesh through the ancestry map
/// (reference implementation used in tests and by the estimator locality
/// check).
pub fn coarse_local_on_fine(
    coarse: &FeSpace,
    f: &FeFunction,
    fine: &FeSpace,
    fine_tri: TriId,
) -> LocalPolynomial {
    let coarse_tri = fine.mesh.provenance.as_ref().expect("refined mesh")[fine_tri].parent();
    f.local_polynomial(coarse, coarse_tri)
}
