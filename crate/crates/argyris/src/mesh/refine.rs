//! Newest-vertex bisection with mesh closure.

use super::{BoundaryEdge, BoundaryLabel, Provenance, TriId, Triangle, Triangulation, VertexId};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Copy)]
struct WorkTri {
    v: [VertexId; 3],
    refine_edge: u8,
    /// Ancestor in the input mesh.
    parent: TriId,
    child: bool,
    alive: bool,
}

fn edge_key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

/// Smallest conforming NVB refinement in which every marked triangle is
/// bisected at least once.
///
/// Bisection inserts the midpoint of the refinement edge; the neighbour
/// across that edge is refined first (recursively) whenever its own
/// refinement edge differs, which is the usual completion and yields the
/// minimal conforming refinement in two dimensions. The result is a pure
/// function of the input: triangle and vertex numbering are reproducible.
pub fn refine_nvb(mesh: &Triangulation, marked: &BTreeSet<TriId>) -> Triangulation {
    if marked.is_empty() {
        return mesh.clone();
    }
    debug_assert!(marked.iter().all(|&t| t < mesh.triangles.len()));

    let mut vertices = mesh.vertices.clone();
    let mut vertex_parent_edge = mesh.vertex_parent_edge.clone();
    let mut tris: Vec<WorkTri> = mesh
        .triangles
        .iter()
        .enumerate()
        .map(|(t, tri)| WorkTri {
            v: tri.v,
            refine_edge: tri.refine_edge,
            parent: t,
            child: false,
            alive: true,
        })
        .collect();

    // alive triangles per edge
    let mut adjacency: HashMap<(VertexId, VertexId), Vec<usize>> = HashMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for k in 0..3 {
            let key = edge_key(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
            adjacency.entry(key).or_default().push(t);
        }
    }
    let mut boundary: BTreeMap<(VertexId, VertexId), BoundaryLabel> = mesh.boundary_map();
    let mut midpoints: HashMap<(VertexId, VertexId), VertexId> = HashMap::new();

    let neighbour = |adjacency: &HashMap<_, Vec<usize>>, key: &(VertexId, VertexId), t: usize| {
        adjacency
            .get(key)
            .into_iter()
            .flatten()
            .copied()
            .find(|&n| n != t)
    };

    // Bisect `t` (and, for conformity, its refinement-edge neighbour, which
    // by then shares the same refinement edge).
    let bisect = |tris: &mut Vec<WorkTri>,
                  vertices: &mut Vec<crate::Vec2>,
                  vertex_parent_edge: &mut Vec<Option<(VertexId, VertexId)>>,
                  adjacency: &mut HashMap<(VertexId, VertexId), Vec<usize>>,
                  boundary: &mut BTreeMap<(VertexId, VertexId), BoundaryLabel>,
                  midpoints: &mut HashMap<(VertexId, VertexId), VertexId>,
                  t: usize| {
        let tri = tris[t];
        let peak = tri.v[tri.refine_edge as usize];
        let a = tri.v[(tri.refine_edge as usize + 1) % 3];
        let b = tri.v[(tri.refine_edge as usize + 2) % 3];
        let key = edge_key(a, b);
        let mid = *midpoints.entry(key).or_insert_with(|| {
            let m = vertices.len();
            vertices.push(0.5 * (vertices[a] + vertices[b]));
            vertex_parent_edge.push(Some(key));
            if let Some(label) = boundary.remove(&key) {
                boundary.insert(edge_key(a, m), label);
                boundary.insert(edge_key(m, b), label);
            }
            m
        });
        tris[t].alive = false;
        if let Some(list) = adjacency.get_mut(&key) {
            list.retain(|&x| x != t);
        }
        for &(p, q) in &[(peak, a), (peak, b)] {
            if let Some(list) = adjacency.get_mut(&edge_key(p, q)) {
                list.retain(|&x| x != t);
            }
        }
        // children keep the ancestor id; the new vertex sits at local slot 0
        // so that the refinement edge of each child is the old outer edge.
        for child_v in [[mid, peak, a], [mid, b, peak]] {
            let c = tris.len();
            tris.push(WorkTri {
                v: child_v,
                refine_edge: 0,
                parent: tri.parent,
                child: true,
                alive: true,
            });
            for k in 0..3 {
                let key = edge_key(child_v[(k + 1) % 3], child_v[(k + 2) % 3]);
                adjacency.entry(key).or_default().push(c);
            }
        }
    };

    // Generous bound on closure work; a violation means the refinement-edge
    // assignment of the input contains a compatibility cycle.
    let mut budget = 64 * (mesh.triangles.len() + marked.len() + 64);
    for &m in marked {
        if tris[m].alive {
            // resolve the compatibility chain with an explicit stack
            let mut stack = vec![m];
            while let Some(&cur) = stack.last() {
                budget -= 1;
                assert!(budget > 0, "mesh closure did not terminate: incompatible refinement-edge assignment");
                if !tris[cur].alive {
                    stack.pop();
                    continue;
                }
                let tri = tris[cur];
                let (a, b) = (
                    tri.v[(tri.refine_edge as usize + 1) % 3],
                    tri.v[(tri.refine_edge as usize + 2) % 3],
                );
                let key = edge_key(a, b);
                match neighbour(&adjacency, &key, cur) {
                    Some(n) => {
                        let ntri = tris[n];
                        let nkey = edge_key(
                            ntri.v[(ntri.refine_edge as usize + 1) % 3],
                            ntri.v[(ntri.refine_edge as usize + 2) % 3],
                        );
                        if nkey == key {
                            // compatible pair: bisect both
                            bisect(
                                &mut tris,
                                &mut vertices,
                                &mut vertex_parent_edge,
                                &mut adjacency,
                                &mut boundary,
                                &mut midpoints,
                                cur,
                            );
                            bisect(
                                &mut tris,
                                &mut vertices,
                                &mut vertex_parent_edge,
                                &mut adjacency,
                                &mut boundary,
                                &mut midpoints,
                                n,
                            );
                            stack.pop();
                        } else {
                            stack.push(n);
                        }
                    }
                    None => {
                        bisect(
                            &mut tris,
                            &mut vertices,
                            &mut vertex_parent_edge,
                            &mut adjacency,
                            &mut boundary,
                            &mut midpoints,
                            cur,
                        );
                        stack.pop();
                    }
                }
            }
        }
    }

    let mut triangles = Vec::new();
    let mut provenance = Vec::new();
    for tri in tris.iter().filter(|t| t.alive) {
        triangles.push(Triangle {
            v: tri.v,
            refine_edge: tri.refine_edge,
        });
        provenance.push(if tri.child {
            Provenance::Child(tri.parent)
        } else {
            Provenance::Unchanged(tri.parent)
        });
    }
    let boundary = boundary
        .into_iter()
        .map(|(v, label)| BoundaryEdge { v, label })
        .collect();

    Triangulation {
        vertices,
        triangles,
        boundary,
        level: mesh.level + 1,
        provenance: Some(provenance),
        num_initial_vertices: mesh.num_initial_vertices,
        vertex_parent_edge,
    }
}
