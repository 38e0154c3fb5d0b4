//! Transformation of the reference element to a physical triangle.
//!
//! The Argyris element is not affine-equivalent: vertex derivatives are taken
//! in per-vertex frames and the edge dof in the direction of a globally fixed
//! edge normal. The physical nodal basis is therefore written in terms of the
//! pulled-back reference basis, with a 21x21 correction matrix assembled from
//! the chain rule for derivatives up to second order.

use super::reference::{reference, N_LOCAL_DOFS};
use crate::mesh::{TriId, Triangulation};
use crate::{Mat2, Vec2};
use nalgebra::SMatrix;

pub type TransformMatrix = SMatrix<f64, N_LOCAL_DOFS, N_LOCAL_DOFS>;

#[derive(Debug)]
pub enum ElementError {
    SingularGeometry { tri: TriId },
    StandardModeProlongation,
    LevelMismatch { coarse: usize, fine: usize },
}

impl std::fmt::Display for ElementError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ElementError::SingularGeometry { tri } => {
                write!(f, "triangle {tri} is degenerate")
            }
            ElementError::StandardModeProlongation => write!(
                f,
                "the standard space has no natural coarse-to-fine injection; prolongation requires the extended space"
            ),
            ElementError::LevelMismatch { coarse, fine } => write!(
                f,
                "prolongation requires consecutive levels, got {coarse} -> {fine}"
            ),
        }
    }
}

impl std::error::Error for ElementError {}

/// Affine geometry of one triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub v0: Vec2,
    pub b: Mat2,
    pub b_inv: Mat2,
    pub det: f64,
}

impl ElementGeometry {
    pub fn new(mesh: &Triangulation, t: TriId) -> Result<Self, ElementError> {
        let [a, b, c] = mesh.triangles[t].v;
        let (pa, pb, pc) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]);
        let m = Mat2::from_columns(&[pb - pa, pc - pa]);
        let det = m.determinant();
        let scale = m.norm_squared();
        if det.abs() <= 1e-14 * scale.max(1e-300) {
            return Err(ElementError::SingularGeometry { tri: t });
        }
        Ok(ElementGeometry {
            v0: pa,
            b: m,
            b_inv: m.try_inverse().ok_or(ElementError::SingularGeometry { tri: t })?,
            det,
        })
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }

    #[inline]
    pub fn to_physical(&self, xhat: Vec2) -> Vec2 {
        self.v0 + self.b * xhat
    }

    #[inline]
    pub fn to_reference(&self, x: Vec2) -> Vec2 {
        self.b_inv * (x - self.v0)
    }

    /// Physical direction mapped to the reference frame (for directional
    /// derivatives of pulled-back polynomials).
    #[inline]
    pub fn pull_direction(&self, d: Vec2) -> Vec2 {
        self.b_inv * d
    }
}

/// Matrix of the physical nodal basis in terms of the pulled-back reference
/// basis: column j holds the reference-basis coefficients of the physical
/// basis function dual to local dof j.
///
/// `frames` lists the (xi, zeta) pair of each of the three vertices and
/// `edge_normals` the fixed unit normal of each edge (edge k opposite vertex
/// k).
pub fn physical_transform(
    geom: &ElementGeometry,
    frames: &[(Vec2, Vec2); 3],
    edge_normals: &[Vec2; 3],
) -> TransformMatrix {
    let re = reference();
    let mut d = TransformMatrix::zeros();
    for v in 0..3 {
        let (xi, zeta) = frames[v];
        let u = geom.b_inv * xi;
        let w = geom.b_inv * zeta;
        for k in 0..N_LOCAL_DOFS {
            let val = re.vertex_value[v][k];
            let g = re.vertex_grad[v][k];
            let h = re.vertex_hess[v][k];
            let hu = Vec2::new(h[0] * u.x + h[1] * u.y, h[1] * u.x + h[2] * u.y);
            let hw = Vec2::new(h[0] * w.x + h[1] * w.y, h[1] * w.x + h[2] * w.y);
            d[(6 * v, k)] = val;
            d[(6 * v + 1, k)] = u.dot(&g);
            d[(6 * v + 2, k)] = w.dot(&g);
            d[(6 * v + 3, k)] = u.dot(&hu);
            d[(6 * v + 4, k)] = u.dot(&hw);
            d[(6 * v + 5, k)] = w.dot(&hw);
        }
    }
    for e in 0..3 {
        let n = geom.b_inv * edge_normals[e];
        for k in 0..N_LOCAL_DOFS {
            d[(18 + e, k)] = n.dot(&re.midpoint_grad[e][k]);
        }
    }
    // Row scales span 1 .. h^-2 and would cost eight digits of the inverse
    // on fine meshes; equilibrate first, then undo the scaling columnwise.
    let mut scale = [0.0f64; N_LOCAL_DOFS];
    for i in 0..N_LOCAL_DOFS {
        let mut s = 0.0f64;
        for k in 0..N_LOCAL_DOFS {
            s = s.max(d[(i, k)].abs());
        }
        scale[i] = s;
        for k in 0..N_LOCAL_DOFS {
            d[(i, k)] /= s;
        }
    }
    let mut m = d
        .try_inverse()
        .expect("local dof matrix is regular for nondegenerate geometry and spanning frames");
    for j in 0..N_LOCAL_DOFS {
        for k in 0..N_LOCAL_DOFS {
            m[(k, j)] /= scale[j];
        }
    }
    m
}
