//! The quintic Argyris reference element.
//!
//! 21 local degrees of freedom on conv{(0,0),(1,0),(0,1)}: value, both first
//! and all three second derivatives at each vertex, plus the normal
//! derivative at each edge midpoint. The dual basis is computed once by
//! solving the dof/monomial system, polished with one step of iterative
//! refinement, and cached for the lifetime of the process.

use crate::poly::{Poly5, N_MONOMIALS};
use crate::Vec2;
use nalgebra::DMatrix;
use std::sync::OnceLock;

pub const N_LOCAL_DOFS: usize = 21;

/// Reference vertices; vertex k is opposite edge k.
pub const REF_VERTICES: [(f64, f64); 3] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];

/// Edge midpoints, edge k opposite vertex k.
pub const REF_EDGE_MIDPOINTS: [(f64, f64); 3] = [(0.5, 0.5), (0.0, 0.5), (0.5, 0.0)];

/// Outward unit normals of the reference edges.
pub fn ref_edge_normal(k: usize) -> Vec2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match k {
        0 => Vec2::new(s, s),
        1 => Vec2::new(-1.0, 0.0),
        _ => Vec2::new(0.0, -1.0),
    }
}

/// Local dof layout: slots 6k..6k+5 belong to vertex k in the order value,
/// d1, d2, d11, d12, d22; slots 18 + k are the edge-midpoint normal
/// derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalDof {
    Vertex { vertex: usize, which: VertexDerivative },
    EdgeNormal { edge: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexDerivative {
    Value,
    D1,
    D2,
    D11,
    D12,
    D22,
}

pub fn local_dof(slot: usize) -> LocalDof {
    if slot < 18 {
        let which = match slot % 6 {
            0 => VertexDerivative::Value,
            1 => VertexDerivative::D1,
            2 => VertexDerivative::D2,
            3 => VertexDerivative::D11,
            4 => VertexDerivative::D12,
            _ => VertexDerivative::D22,
        };
        LocalDof::Vertex {
            vertex: slot / 6,
            which,
        }
    } else {
        LocalDof::EdgeNormal { edge: slot - 18 }
    }
}

/// Apply reference dof `slot` (derivatives in the canonical x/y directions)
/// to a polynomial.
pub fn apply_ref_dof(slot: usize, p: &Poly5) -> f64 {
    match local_dof(slot) {
        LocalDof::Vertex { vertex, which } => {
            let (x, y) = REF_VERTICES[vertex];
            let at = Vec2::new(x, y);
            match which {
                VertexDerivative::Value => p.eval(at),
                VertexDerivative::D1 => p.dx().eval(at),
                VertexDerivative::D2 => p.dy().eval(at),
                VertexDerivative::D11 => p.dx().dx().eval(at),
                VertexDerivative::D12 => p.dx().dy().eval(at),
                VertexDerivative::D22 => p.dy().dy().eval(at),
            }
        }
        LocalDof::EdgeNormal { edge } => {
            let (x, y) = REF_EDGE_MIDPOINTS[edge];
            let at = Vec2::new(x, y);
            let n = ref_edge_normal(edge);
            n.x * p.dx().eval(at) + n.y * p.dy().eval(at)
        }
    }
}

/// Reference basis and evaluation tables at the three vertices and edge
/// midpoints (used by the physical transformation).
pub struct ReferenceElement {
    pub basis: [Poly5; N_LOCAL_DOFS],
    /// value, gradient, Hessian (xx, xy, yy) of every basis function at each
    /// reference vertex.
    pub vertex_value: [[f64; N_LOCAL_DOFS]; 3],
    pub vertex_grad: [[Vec2; N_LOCAL_DOFS]; 3],
    pub vertex_hess: [[[f64; 3]; N_LOCAL_DOFS]; 3],
    /// gradient of every basis function at each edge midpoint.
    pub midpoint_grad: [[Vec2; N_LOCAL_DOFS]; 3],
}

static REFERENCE: OnceLock<ReferenceElement> = OnceLock::new();

pub fn reference() -> &'static ReferenceElement {
    REFERENCE.get_or_init(build_reference)
}

fn build_reference() -> ReferenceElement {
    // G[dof][monomial]
    let mut g = DMatrix::<f64>::zeros(N_LOCAL_DOFS, N_MONOMIALS);
    for slot in 0..N_LOCAL_DOFS {
        for m in 0..N_MONOMIALS {
            let mut mono = Poly5::zero();
            mono.c[m] = 1.0;
            g[(slot, m)] = apply_ref_dof(slot, &mono);
        }
    }
    let lu = g.clone().lu();
    let mut coeffs = lu
        .solve(&DMatrix::identity(N_LOCAL_DOFS, N_LOCAL_DOFS))
        .expect("Argyris reference dof matrix is regular");
    // one step of iterative refinement for the duality tolerance
    let residual = DMatrix::identity(N_LOCAL_DOFS, N_LOCAL_DOFS) - &g * &coeffs;
    let correction = lu.solve(&residual).expect("refinement solve");
    coeffs += correction;

    let mut basis = [Poly5::zero(); N_LOCAL_DOFS];
    for j in 0..N_LOCAL_DOFS {
        for m in 0..N_MONOMIALS {
            basis[j].c[m] = coeffs[(m, j)];
        }
    }

    let mut vertex_value = [[0.0; N_LOCAL_DOFS]; 3];
    let mut vertex_grad = [[Vec2::zeros(); N_LOCAL_DOFS]; 3];
    let mut vertex_hess = [[[0.0; 3]; N_LOCAL_DOFS]; 3];
    let mut midpoint_grad = [[Vec2::zeros(); N_LOCAL_DOFS]; 3];
    for j in 0..N_LOCAL_DOFS {
        let p = &basis[j];
        let px = p.dx();
        let py = p.dy();
        let pxx = px.dx();
        let pxy = px.dy();
        let pyy = py.dy();
        for v in 0..3 {
            let at = Vec2::new(REF_VERTICES[v].0, REF_VERTICES[v].1);
            vertex_value[v][j] = p.eval(at);
            vertex_grad[v][j] = Vec2::new(px.eval(at), py.eval(at));
            vertex_hess[v][j] = [pxx.eval(at), pxy.eval(at), pyy.eval(at)];
        }
        for e in 0..3 {
            let at = Vec2::new(REF_EDGE_MIDPOINTS[e].0, REF_EDGE_MIDPOINTS[e].1);
            midpoint_grad[e][j] = Vec2::new(px.eval(at), py.eval(at));
        }
    }

    ReferenceElement {
        basis,
        vertex_value,
        vertex_grad,
        vertex_hess,
        midpoint_grad,
    }
}
