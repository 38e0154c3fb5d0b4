//! Global degrees of freedom for the standard and extended Argyris spaces.

use super::transform::{physical_transform, ElementError, ElementGeometry, TransformMatrix};
use crate::mesh::{BoundaryLabel, EdgeTopology, Triangulation, VertexFrames, VertexId};

/// Which space a dof map enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceMode {
    Standard,
    Extended,
}

/// Kind of a global dof. Derivatives refer to the local frame (xi, zeta) of
/// the vertex; the plus/minus variants are the one-sided second derivatives
/// carried by bisection vertices of the extended space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofKind {
    Value,
    DXi,
    DZeta,
    DXiXi,
    DXiZeta,
    DZetaZeta,
    DZetaZetaPlus,
    DZetaZetaMinus,
    EdgeNormal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofNode {
    Vertex(VertexId),
    Edge(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct Dof {
    pub node: DofNode,
    pub kind: DofKind,
}

/// Enumerated dofs with the per-triangle local-to-global map and the cached
/// physical transformation matrices.
pub struct DofMap {
    pub mode: SpaceMode,
    pub dofs: Vec<Dof>,
    pub vertex_dof_start: Vec<u32>,
    pub vertex_dof_count: Vec<u8>,
    /// Global dof of the midpoint normal derivative per edge.
    pub edge_dof: Vec<u32>,
    pub constrained: Vec<bool>,
    /// Free index per global dof (u32::MAX for constrained dofs).
    pub free_index: Vec<u32>,
    /// Global ids of the free dofs in ascending order.
    pub free_dofs: Vec<u32>,
    pub tri_dofs: Vec<[u32; 21]>,
    pub transforms: Vec<TransformMatrix>,
}

impl DofMap {
    pub fn n_dofs(&self) -> usize {
        self.dofs.len()
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    /// Split a full-length coefficient vector into the free part.
    pub fn restrict_to_free(&self, full: &[f64]) -> Vec<f64> {
        self.free_dofs.iter().map(|&d| full[d as usize]).collect()
    }

    /// Scatter free coefficients into a full-length vector (constrained
    /// entries zero).
    pub fn scatter_free(&self, free: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n_dofs()];
        for (k, &d) in self.free_dofs.iter().enumerate() {
            full[d as usize] = free[k];
        }
        full
    }

    /// Whether the vertex carries split one-sided second derivatives.
    pub fn is_split_vertex(&self, v: VertexId) -> bool {
        self.vertex_dof_count[v] == 7
    }
}

/// Build the dof map: vertices in index order (each with its dofs in the
/// canonical order), then edge midpoints in edge order. The constrained set
/// collects the boundary-vertex dofs selected by the frame table plus the
/// midpoint normal derivatives on clamped edges.
pub fn build_dof_map(
    mesh: &Triangulation,
    topo: &EdgeTopology,
    frames: &VertexFrames,
    mode: SpaceMode,
) -> Result<DofMap, ElementError> {
    let nv = mesh.vertices.len();
    let mut dofs: Vec<Dof> = Vec::new();
    let mut vertex_dof_start = Vec::with_capacity(nv);
    let mut vertex_dof_count = Vec::with_capacity(nv);
    let mut constrained: Vec<bool> = Vec::new();

    for v in 0..nv {
        vertex_dof_start.push(dofs.len() as u32);
        let split = mode == SpaceMode::Extended
            && !frames.is_boundary(v)
            && !mesh.is_initial_vertex(v);
        let kinds: &[DofKind] = if split {
            &[
                DofKind::Value,
                DofKind::DXi,
                DofKind::DZeta,
                DofKind::DXiXi,
                DofKind::DXiZeta,
                DofKind::DZetaZetaPlus,
                DofKind::DZetaZetaMinus,
            ]
        } else {
            &[
                DofKind::Value,
                DofKind::DXi,
                DofKind::DZeta,
                DofKind::DXiXi,
                DofKind::DXiZeta,
                DofKind::DZetaZeta,
            ]
        };
        vertex_dof_count.push(kinds.len() as u8);
        for (slot, &kind) in kinds.iter().enumerate() {
            dofs.push(Dof {
                node: DofNode::Vertex(v),
                kind,
            });
            // split vertices are interior and never constrained
            constrained.push(!split && frames.is_constrained(v, slot.min(5)));
        }
    }
    let mut edge_dof = Vec::with_capacity(topo.edges.len());
    for (e, edge) in topo.edges.iter().enumerate() {
        edge_dof.push(dofs.len() as u32);
        dofs.push(Dof {
            node: DofNode::Edge(e),
            kind: DofKind::EdgeNormal,
        });
        constrained.push(edge.label == Some(BoundaryLabel::Clamped));
    }

    let mut free_index = vec![u32::MAX; dofs.len()];
    let mut free_dofs = Vec::new();
    for (d, &c) in constrained.iter().enumerate() {
        if !c {
            free_index[d] = free_dofs.len() as u32;
            free_dofs.push(d as u32);
        }
    }

    let mut tri_dofs = Vec::with_capacity(mesh.triangles.len());
    let mut transforms = Vec::with_capacity(mesh.triangles.len());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let geom = ElementGeometry::new(mesh, t)?;
        let centroid = mesh.centroid(t);
        let mut local = [0u32; 21];
        let mut tri_frames = [(crate::Vec2::zeros(), crate::Vec2::zeros()); 3];
        for k in 0..3 {
            let v = tri.v[k];
            tri_frames[k] = (frames.xi[v], frames.zeta[v]);
            let start = vertex_dof_start[v];
            for slot in 0..5 {
                local[6 * k + slot] = start + slot as u32;
            }
            local[6 * k + 5] = if vertex_dof_count[v] == 7 {
                // one-sided dof by the side of the centroid relative to the
                // bisected parent edge (its normal is the zeta direction)
                let plus = (centroid - mesh.vertices[v]).dot(&frames.zeta[v]) > 0.0;
                start + if plus { 5 } else { 6 }
            } else {
                start + 5
            };
        }
        let mut edge_normals = [crate::Vec2::zeros(); 3];
        for k in 0..3 {
            let e = topo.tri_edges[t][k];
            edge_normals[k] = topo.edges[e].normal;
            local[18 + k] = edge_dof[e];
        }
        tri_dofs.push(local);
        transforms.push(physical_transform(&geom, &tri_frames, &edge_normals));
    }

    Ok(DofMap {
        mode,
        dofs,
        vertex_dof_start,
        vertex_dof_count,
        edge_dof,
        constrained,
        free_index,
        free_dofs,
        tri_dofs,
        transforms,
    })
}
