//! Nodal interpolation onto the Argyris space.

use super::{DofKind, DofNode, FeFunction, FeSpace};
use crate::problem::BoundaryDatum;

/// Interpolate `g`: the coefficient of every dof is the dof applied to `g`;
/// both one-sided second derivatives of a split vertex receive the same
/// (single-valued) value.
pub fn nodal_interpolate(space: &FeSpace, g: &dyn BoundaryDatum) -> FeFunction {
    let mut f = FeFunction::zeros(space);
    if g.is_zero() {
        return f;
    }
    for (d, dof) in space.dofs.dofs.iter().enumerate() {
        f.coeffs[d] = match dof.node {
            DofNode::Vertex(v) => {
                let p = space.mesh.vertices[v];
                let witness = space.mesh.centroid(space.topo.vertex_tri[v]);
                let (xi, zeta) = (space.frames.xi[v], space.frames.zeta[v]);
                match dof.kind {
                    DofKind::Value => g.value(p, witness),
                    DofKind::DXi => xi.dot(&g.gradient(p, witness)),
                    DofKind::DZeta => zeta.dot(&g.gradient(p, witness)),
                    DofKind::DXiXi => (xi.transpose() * g.hessian(p, witness) * xi).x,
                    DofKind::DXiZeta => (xi.transpose() * g.hessian(p, witness) * zeta).x,
                    DofKind::DZetaZeta
                    | DofKind::DZetaZetaPlus
                    | DofKind::DZetaZetaMinus => {
                        (zeta.transpose() * g.hessian(p, witness) * zeta).x
                    }
                    DofKind::EdgeNormal => unreachable!("vertex node with edge kind"),
                }
            }
            DofNode::Edge(e) => {
                let edge = &space.topo.edges[e];
                let witness = space.mesh.centroid(edge.tri_plus);
                edge.normal.dot(&g.gradient(edge.midpoint, witness))
            }
        };
    }
    f
}
