//! Edge topology: unique edges, fixed tangents/normals, adjacency.

use super::{lex_less, BoundaryLabel, EdgeId, MeshError, TriId, Triangulation, VertexId};
use crate::{rot_minus_90, rot_plus_90, Vec2};
use std::collections::HashMap;

/// Oriented edge of a triangulation.
///
/// The normal is the tangent rotated by -90 degrees. Interior edges point
/// from the lexicographically smaller endpoint to the larger one; boundary
/// edges are oriented so that the normal points out of the domain.
#[derive(Clone, Debug)]
pub struct Edge {
    pub v: (VertexId, VertexId),
    pub tangent: Vec2,
    pub normal: Vec2,
    pub midpoint: Vec2,
    pub length: f64,
    /// Adjacent triangle on the side the normal points away from.
    pub tri_plus: TriId,
    /// Second adjacent triangle; absent for boundary edges.
    pub tri_minus: Option<TriId>,
    pub label: Option<BoundaryLabel>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.tri_minus.is_none()
    }
}

/// All edges of a triangulation plus lookup tables.
#[derive(Clone, Debug)]
pub struct EdgeTopology {
    pub edges: Vec<Edge>,
    /// Edge ids per triangle; entry k is the edge opposite local vertex k.
    pub tri_edges: Vec<[EdgeId; 3]>,
    /// Boundary edge ids incident to each vertex.
    pub vertex_boundary_edges: Vec<Vec<EdgeId>>,
    /// Smallest adjacent triangle id per vertex.
    pub vertex_tri: Vec<TriId>,
}

/// Enumerate edges with adjacency and orientation.
pub fn build_topology(mesh: &Triangulation) -> Result<EdgeTopology, MeshError> {
    mesh.validate()?;
    let boundary = mesh.boundary_map();
    let mut index: HashMap<(VertexId, VertexId), EdgeId> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut tri_edges = vec![[usize::MAX; 3]; mesh.triangles.len()];
    let mut vertex_tri = vec![usize::MAX; mesh.vertices.len()];

    for (t, tri) in mesh.triangles.iter().enumerate() {
        for &v in &tri.v {
            if vertex_tri[v] == usize::MAX {
                vertex_tri[v] = t;
            }
        }
        for k in 0..3 {
            let a = tri.v[(k + 1) % 3];
            let b = tri.v[(k + 2) % 3];
            let key = (a.min(b), a.max(b));
            let id = *index.entry(key).or_insert_with(|| {
                let (lo, hi) = if lex_less(&mesh.vertices, a, b) {
                    (a, b)
                } else {
                    (b, a)
                };
                let dir = mesh.vertices[hi] - mesh.vertices[lo];
                let length = dir.norm();
                let tangent = dir / length;
                edges.push(Edge {
                    v: (lo, hi),
                    tangent,
                    normal: rot_minus_90(tangent),
                    midpoint: 0.5 * (mesh.vertices[lo] + mesh.vertices[hi]),
                    length,
                    tri_plus: t,
                    tri_minus: None,
                    label: boundary.get(&key).copied(),
                });
                edges.len() - 1
            });
            let edge = &mut edges[id];
            if edge.tri_plus != t {
                edge.tri_minus = Some(t);
            }
            tri_edges[t][k] = id;
        }
    }

    // Orientation fixes. Boundary edges: normal outward, tangent follows by
    // +90 rotation. Interior edges: tri_plus on the side the normal points
    // away from (so the jump convention q|T+ - q|T- is well defined).
    for edge in &mut edges {
        match edge.tri_minus {
            None => {
                let t = edge.tri_plus;
                let tri = &mesh.triangles[t];
                // local traversal direction a -> b in counter-clockwise order
                let k = (0..3)
                    .find(|&k| {
                        let a = tri.v[(k + 1) % 3];
                        let b = tri.v[(k + 2) % 3];
                        (a.min(b), a.max(b)) == (edge.v.0.min(edge.v.1), edge.v.0.max(edge.v.1))
                    })
                    .expect("edge belongs to its triangle");
                let a = tri.v[(k + 1) % 3];
                let b = tri.v[(k + 2) % 3];
                let dir = (mesh.vertices[b] - mesh.vertices[a]).normalize();
                let outward = rot_minus_90(dir);
                edge.normal = outward;
                edge.tangent = rot_plus_90(outward);
                if edge.v != (a, b) {
                    edge.v = (a, b);
                }
            }
            Some(minus) => {
                let plus = edge.tri_plus;
                let side = |t: TriId| (mesh.centroid(t) - edge.midpoint).dot(&edge.normal);
                if side(plus) > 0.0 && side(minus) < 0.0 {
                    // tri_plus sits on the +normal side; swap so the normal
                    // points from T+ towards T-.
                    edge.tri_plus = minus;
                    edge.tri_minus = Some(plus);
                }
            }
        }
    }

    let mut vertex_boundary_edges = vec![Vec::new(); mesh.vertices.len()];
    for (id, edge) in edges.iter().enumerate() {
        if edge.is_boundary() {
            vertex_boundary_edges[edge.v.0].push(id);
            vertex_boundary_edges[edge.v.1].push(id);
        }
    }

    Ok(EdgeTopology {
        edges,
        tri_edges,
        vertex_boundary_edges,
        vertex_tri,
    })
}

impl EdgeTopology {
    pub fn n_interior(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_boundary()).count()
    }

    pub fn n_boundary(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary()).count()
    }
}
