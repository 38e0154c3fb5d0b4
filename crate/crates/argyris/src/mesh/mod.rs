//! Two-dimensional triangulations with newest-vertex bisection.
//!
//! A [`Triangulation`] stores vertex coordinates, triangles with a designated
//! refinement edge, labelled boundary edges and enough genealogy (parent
//! triangles, parent edges of bisection vertices) to drive the hierarchical
//! element spaces and the multilevel solver. The companion types
//! [`EdgeTopology`] and [`VertexFrames`] are derived views: unique edges with
//! fixed tangent/normal orientation, and the per-vertex local coordinate
//! systems with their constrained dof sets.

mod frames;
mod io;
mod refine;
mod topology;

pub use frames::{assign_vertex_frames, topology_and_frames, FrameKind, VertexFrames};
pub use io::{load_mesh, save_mesh};
pub use refine::refine_nvb;
pub use topology::{build_topology, Edge, EdgeTopology};

use crate::Vec2;
use std::collections::BTreeMap;
use std::fmt;

pub type VertexId = usize;
pub type TriId = usize;
pub type EdgeId = usize;

/// Boundary condition attached to a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryLabel {
    /// Displacement and normal derivative prescribed.
    Clamped,
    /// Displacement prescribed.
    SimplySupported,
    /// Nothing prescribed.
    Free,
}

impl fmt::Display for BoundaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryLabel::Clamped => write!(f, "Clamped"),
            BoundaryLabel::SimplySupported => write!(f, "SimplySupported"),
            BoundaryLabel::Free => write!(f, "Free"),
        }
    }
}

/// Triangle with a designated refinement edge.
///
/// Local edge k joins vertices (k+1)%3 and (k+2)%3, i.e. lies opposite local
/// vertex k. Vertices are ordered counter-clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub v: [VertexId; 3],
    pub refine_edge: u8,
}

impl Triangle {
    /// Endpoints of the refinement edge.
    pub fn refine_edge_vertices(&self) -> (VertexId, VertexId) {
        let k = self.refine_edge as usize;
        (self.v[(k + 1) % 3], self.v[(k + 2) % 3])
    }

    /// Vertex opposite the refinement edge.
    pub fn peak(&self) -> VertexId {
        self.v[self.refine_edge as usize]
    }
}

/// Labelled boundary edge (unordered vertex pair).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub v: (VertexId, VertexId),
    pub label: BoundaryLabel,
}

/// How a triangle of the current level relates to the previous level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Present unchanged on the previous level under the given id.
    Unchanged(TriId),
    /// Created by bisection; the id names the previous-level ancestor.
    Child(TriId),
}

impl Provenance {
    pub fn parent(&self) -> TriId {
        match *self {
            Provenance::Unchanged(t) | Provenance::Child(t) => t,
        }
    }
}

/// Conforming triangulation of a polygonal domain.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub vertices: Vec<Vec2>,
    pub triangles: Vec<Triangle>,
    pub boundary: Vec<BoundaryEdge>,
    /// Refinement generation; 0 for an initial mesh.
    pub level: usize,
    /// Relation to the previous level; `None` at level 0.
    pub provenance: Option<Vec<Provenance>>,
    /// Vertices 0..n0 are the vertices of the initial triangulation.
    pub num_initial_vertices: usize,
    /// For bisection vertices, the endpoints of the bisected edge.
    pub vertex_parent_edge: Vec<Option<(VertexId, VertexId)>>,
}

/// Mesh construction or consistency failure.
#[derive(Debug)]
pub enum MeshError {
    NonPositiveArea {
        tri: TriId,
    },
    /// An edge is shared by more than two triangles or the boundary list does
    /// not match the edges with a single adjacent triangle.
    NonConforming {
        edge: (VertexId, VertexId),
        detail: &'static str,
    },
    BoundaryConfig {
        vertex: VertexId,
        detail: &'static str,
    },
    Io(std::io::Error),
    Parse {
        line: usize,
        detail: String,
    },
}

impl fmt::Display for MeshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshError::NonPositiveArea { tri } => {
                write!(f, "triangle {tri} has non-positive signed area")
            }
            MeshError::NonConforming { edge, detail } => {
                write!(f, "non-conforming mesh at edge ({}, {}): {detail}", edge.0, edge.1)
            }
            MeshError::BoundaryConfig { vertex, detail } => {
                write!(f, "invalid boundary configuration at vertex {vertex}: {detail}")
            }
            MeshError::Io(e) => write!(f, "mesh io error: {e}"),
            MeshError::Parse { line, detail } => write!(f, "mesh parse error in line {line}: {detail}"),
        }
    }
}

impl std::error::Error for MeshError {}

impl From<std::io::Error> for MeshError {
    fn from(e: std::io::Error) -> Self {
        MeshError::Io(e)
    }
}

/// Total order on vertices by coordinates (x, then y), with the vertex id as
/// a final tie-break for duplicated points (slit domains).
///
/// Edge orientations derive from this order so that they depend only on the
/// geometry of the initial mesh and the bisection genealogy, never on the
/// order in which triangles were marked.
pub fn lex_less(points: &[Vec2], a: VertexId, b: VertexId) -> bool {
    let (pa, pb) = (points[a], points[b]);
    match pa.x.total_cmp(&pb.x) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => match pa.y.total_cmp(&pb.y) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => a < b,
        },
    }
}

impl Triangulation {
    /// Build a level-0 mesh from raw parts.
    ///
    /// Refinement edges are initialised as the longest edge of each triangle
    /// (ties broken by the smallest opposite-vertex index); triangle
    /// orientation and conformity are validated.
    pub fn from_parts(
        vertices: Vec<Vec2>,
        triangles: Vec<[VertexId; 3]>,
        boundary: Vec<BoundaryEdge>,
    ) -> Result<Self, MeshError> {
        let n_vertices = vertices.len();
        let tris = triangles
            .iter()
            .map(|&v| {
                let mut best = 0u8;
                let mut best_len = -1.0;
                for k in 0..3usize {
                    let a = vertices[v[(k + 1) % 3]];
                    let b = vertices[v[(k + 2) % 3]];
                    let len = (b - a).norm();
                    if len > best_len + 1e-14 * (1.0 + len) {
                        best_len = len;
                        best = k as u8;
                    }
                }
                Triangle {
                    v,
                    refine_edge: best,
                }
            })
            .collect();
        let mesh = Triangulation {
            vertices,
            triangles: tris,
            boundary,
            level: 0,
            provenance: None,
            num_initial_vertices: n_vertices,
            vertex_parent_edge: vec![None; n_vertices],
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn signed_area(&self, t: TriId) -> f64 {
        let [a, b, c] = self.triangles[t].v;
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y))
    }

    pub fn area(&self, t: TriId) -> f64 {
        self.signed_area(t).abs()
    }

    pub fn centroid(&self, t: TriId) -> Vec2 {
        let [a, b, c] = self.triangles[t].v;
        (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0
    }

    /// Longest edge length of a triangle.
    pub fn diameter(&self, t: TriId) -> f64 {
        let [a, b, c] = self.triangles[t].v;
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (pb - pa)
            .norm()
            .max((pc - pb).norm())
            .max((pa - pc).norm())
    }

    pub fn is_initial_vertex(&self, v: VertexId) -> bool {
        v < self.num_initial_vertices
    }

    /// Map from unordered vertex pairs to boundary labels.
    pub fn boundary_map(&self) -> BTreeMap<(VertexId, VertexId), BoundaryLabel> {
        self.boundary
            .iter()
            .map(|be| {
                let (a, b) = be.v;
                ((a.min(b), a.max(b)), be.label)
            })
            .collect()
    }

    /// Check orientation and conformity; boundary list must coincide with the
    /// set of edges adjacent to exactly one triangle.
    pub fn validate(&self) -> Result<(), MeshError> {
        for t in 0..self.triangles.len() {
            if self.signed_area(t) <= 0.0 {
                return Err(MeshError::NonPositiveArea { tri: t });
            }
        }
        let mut count: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let a = tri.v[(k + 1) % 3];
                let b = tri.v[(k + 2) % 3];
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let boundary = self.boundary_map();
        for (&edge, &n) in &count {
            match n {
                1 => {
                    if !boundary.contains_key(&edge) {
                        return Err(MeshError::NonConforming {
                            edge,
                            detail: "edge with one adjacent triangle is not in the boundary list",
                        });
                    }
                }
                2 => {
                    if boundary.contains_key(&edge) {
                        return Err(MeshError::NonConforming {
                            edge,
                            detail: "interior edge appears in the boundary list",
                        });
                    }
                }
                _ => {
                    return Err(MeshError::NonConforming {
                        edge,
                        detail: "edge shared by more than two triangles",
                    })
                }
            }
        }
        for (&edge, _) in &boundary {
            if !count.contains_key(&edge) {
                return Err(MeshError::NonConforming {
                    edge,
                    detail: "boundary entry is not an edge of the mesh",
                });
            }
        }
        Ok(())
    }
}
