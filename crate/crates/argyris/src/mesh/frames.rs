//! Per-vertex local coordinate systems and constrained dof sets.
//!
//! Interior vertices of the initial mesh carry the standard basis. A vertex
//! created by bisection of an interior edge carries that edge's tangent and
//! normal, which is what makes the one-sided second-derivative splitting of
//! the hierarchical space well defined. Boundary vertices get their frame and
//! the set of constrained vertex dofs from the boundary labels of the two
//! incident boundary edges and the interior angle.

use super::{build_topology, BoundaryLabel, EdgeTopology, MeshError, Triangulation, VertexId};
use crate::{rot_minus_90, Vec2};

/// Provenance of a vertex frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    InteriorInitial,
    /// Midpoint of the recorded interior edge.
    InteriorNew {
        parent_edge: (VertexId, VertexId),
    },
    /// Boundary vertex; labels of the two incident boundary edges (stronger
    /// condition first) and whether the boundary is straight there.
    Boundary {
        labels: (BoundaryLabel, BoundaryLabel),
        straight: bool,
    },
}

/// Frames and constrained vertex dofs of a triangulation.
#[derive(Clone, Debug)]
pub struct VertexFrames {
    pub xi: Vec<Vec2>,
    pub zeta: Vec<Vec2>,
    /// Bitmask over the six vertex dofs (value, d_xi, d_zeta, d_xixi,
    /// d_xizeta, d_zetazeta); bit j set means dof j+1 is constrained.
    pub constrained: Vec<u8>,
    pub kind: Vec<FrameKind>,
}

impl VertexFrames {
    pub fn is_constrained(&self, v: VertexId, slot: usize) -> bool {
        self.constrained[v] >> slot & 1 == 1
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        matches!(self.kind[v], FrameKind::Boundary { .. })
    }
}

const J_NONE: u8 = 0b000000;
const J_12345: u8 = 0b011111;
const J_ALL: u8 = 0b111111;
const J_124: u8 = 0b001011;
const J_12346: u8 = 0b101111;

fn straight(omega: f64) -> bool {
    (omega - std::f64::consts::PI).abs() <= 1e-12
}

/// Compute frames for every vertex of the mesh.
pub fn assign_vertex_frames(
    mesh: &Triangulation,
    topo: &EdgeTopology,
) -> Result<VertexFrames, MeshError> {
    let n = mesh.vertices.len();
    let mut xi = vec![Vec2::new(1.0, 0.0); n];
    let mut zeta = vec![Vec2::new(0.0, 1.0); n];
    let mut constrained = vec![J_NONE; n];
    let mut kind = vec![FrameKind::InteriorInitial; n];

    // interior angle at each vertex: sum of incident triangle angles
    let mut omega = vec![0.0f64; n];
    for tri in &mesh.triangles {
        for k in 0..3 {
            let z = tri.v[k];
            let a = mesh.vertices[tri.v[(k + 1) % 3]] - mesh.vertices[z];
            let b = mesh.vertices[tri.v[(k + 2) % 3]] - mesh.vertices[z];
            omega[z] += (a.dot(&b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos();
        }
    }

    for v in 0..n {
        let incident = &topo.vertex_boundary_edges[v];
        if incident.is_empty() {
            if mesh.is_initial_vertex(v) {
                kind[v] = FrameKind::InteriorInitial;
            } else {
                let parent_edge = mesh.vertex_parent_edge[v].ok_or(MeshError::BoundaryConfig {
                    vertex: v,
                    detail: "interior non-initial vertex without parent edge",
                })?;
                // same orientation rule as the edge topology: from the
                // lexicographically smaller endpoint to the larger one
                let (a, b) = parent_edge;
                let (lo, hi) = if super::lex_less(&mesh.vertices, a, b) {
                    (a, b)
                } else {
                    (b, a)
                };
                let tangent = (mesh.vertices[hi] - mesh.vertices[lo]).normalize();
                xi[v] = tangent;
                zeta[v] = rot_minus_90(tangent);
                kind[v] = FrameKind::InteriorNew { parent_edge };
            }
            continue;
        }
        if incident.len() != 2 {
            return Err(MeshError::BoundaryConfig {
                vertex: v,
                detail: "boundary vertex must have exactly two incident boundary edges",
            });
        }
        // order the two edges: stronger condition first (C before S before F),
        // ties broken by the coordinates of the far endpoint
        let far = |eid: usize| -> VertexId {
            let e = &topo.edges[eid];
            if e.v.0 == v {
                e.v.1
            } else {
                e.v.0
            }
        };
        let (mut e0, mut e1) = (incident[0], incident[1]);
        let (l0, l1) = (
            topo.edges[e0].label.expect("boundary edge has a label"),
            topo.edges[e1].label.expect("boundary edge has a label"),
        );
        if l1 < l0 || (l1 == l0 && super::lex_less(&mesh.vertices, far(e1), far(e0))) {
            std::mem::swap(&mut e0, &mut e1);
        }
        let labels = (
            topo.edges[e0].label.unwrap(),
            topo.edges[e1].label.unwrap(),
        );
        let is_straight = straight(omega[v]);
        let (frame, mask) = match labels {
            (BoundaryLabel::Clamped, BoundaryLabel::Clamped) => (
                Some((topo.edges[e0].tangent, topo.edges[e0].normal)),
                if is_straight { J_12345 } else { J_ALL },
            ),
            (BoundaryLabel::Clamped, BoundaryLabel::SimplySupported)
            | (BoundaryLabel::Clamped, BoundaryLabel::Free) => (
                Some((topo.edges[e0].tangent, topo.edges[e0].normal)),
                J_12345,
            ),
            (BoundaryLabel::SimplySupported, BoundaryLabel::SimplySupported) => {
                if is_straight {
                    (Some((topo.edges[e0].tangent, topo.edges[e0].normal)), J_124)
                } else {
                    let (t0, t1) = (topo.edges[e0].tangent, topo.edges[e1].tangent);
                    if (t0.x * t1.y - t0.y * t1.x).abs() < 1e-12 {
                        return Err(MeshError::BoundaryConfig {
                            vertex: v,
                            detail: "collinear tangents cannot span a frame at this corner",
                        });
                    }
                    (Some((t0, t1)), J_12346)
                }
            }
            (BoundaryLabel::SimplySupported, BoundaryLabel::Free) => (
                Some((topo.edges[e0].tangent, topo.edges[e0].normal)),
                J_124,
            ),
            (BoundaryLabel::Free, BoundaryLabel::Free) => (None, J_NONE),
            _ => {
                return Err(MeshError::BoundaryConfig {
                    vertex: v,
                    detail: "boundary label pair outside the supported cases",
                })
            }
        };
        if let Some((x, z)) = frame {
            xi[v] = x;
            zeta[v] = z;
        }
        constrained[v] = mask;
        kind[v] = FrameKind::Boundary {
            labels,
            straight: is_straight,
        };
    }

    Ok(VertexFrames {
        xi,
        zeta,
        constrained,
        kind,
    })
}

/// Convenience: topology and frames in one step.
pub fn topology_and_frames(
    mesh: &Triangulation,
) -> Result<(EdgeTopology, VertexFrames), MeshError> {
    let topo = build_topology(mesh)?;
    let frames = assign_vertex_frames(mesh, &topo)?;
    Ok((topo, frames))
}
