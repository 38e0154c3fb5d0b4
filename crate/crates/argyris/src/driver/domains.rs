//! Initial triangulations of the benchmark domains.

use crate::mesh::{BoundaryEdge, BoundaryLabel, Triangulation, VertexId};
use crate::Vec2;

fn all_clamped(
    vertices: Vec<Vec2>,
    triangles: Vec<[VertexId; 3]>,
    boundary_pairs: Vec<(VertexId, VertexId)>,
) -> Triangulation {
    let boundary = boundary_pairs
        .into_iter()
        .map(|v| BoundaryEdge {
            v,
            label: BoundaryLabel::Clamped,
        })
        .collect();
    Triangulation::from_parts(vertices, triangles, boundary).expect("valid benchmark mesh")
}

/// Unit square (0,1)^2, two triangles, fully clamped.
pub fn square_clamped() -> Triangulation {
    let vertices = vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(0.0, 1.0),
    ];
    let triangles = vec![[0, 1, 2], [0, 2, 3]];
    let boundary_pairs = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
    all_clamped(vertices, triangles, boundary_pairs)
}

/// L-shape (-1,1)^2 \ [0,1)^2, six triangles, fully clamped.
pub fn l_shape_clamped() -> Triangulation {
    let vertices = vec![
        Vec2::new(-1.0, -1.0), // 0
        Vec2::new(0.0, -1.0),  // 1
        Vec2::new(1.0, -1.0),  // 2
        Vec2::new(-1.0, 0.0),  // 3
        Vec2::new(0.0, 0.0),   // 4
        Vec2::new(1.0, 0.0),   // 5
        Vec2::new(-1.0, 1.0),  // 6
        Vec2::new(0.0, 1.0),   // 7
    ];
    let triangles = vec![
        [0, 1, 4],
        [0, 4, 3],
        [1, 2, 5],
        [1, 5, 4],
        [3, 4, 7],
        [3, 7, 6],
    ];
    let boundary_pairs = vec![
        (0, 1),
        (1, 2),
        (2, 5),
        (5, 4),
        (4, 7),
        (7, 6),
        (6, 3),
        (3, 0),
    ];
    all_clamped(vertices, triangles, boundary_pairs)
}

/// Square (-1,1)^2 slit along the segment from the origin to (0,1).
///
/// The slit line carries two boundary faces; mesh vertices on it exist twice
/// (the slit tip at the origin stays a single vertex, where functions of the
/// trial space are still twice differentiable). Eight triangles fan around
/// the tip, fully clamped.
pub fn slit_square_clamped() -> Triangulation {
    let vertices = vec![
        Vec2::new(0.0, 0.0),   // 0 tip
        Vec2::new(0.0, 1.0),   // 1 top mid, right copy
        Vec2::new(1.0, 1.0),   // 2
        Vec2::new(1.0, 0.0),   // 3
        Vec2::new(1.0, -1.0),  // 4
        Vec2::new(0.0, -1.0),  // 5
        Vec2::new(-1.0, -1.0), // 6
        Vec2::new(-1.0, 0.0),  // 7
        Vec2::new(-1.0, 1.0),  // 8
        Vec2::new(0.0, 1.0),   // 9 top mid, left copy
    ];
    // ring in clockwise order seen from the tip
    let ring = [1usize, 2, 3, 4, 5, 6, 7, 8, 9];
    let mut triangles = Vec::new();
    let mut boundary_pairs = Vec::new();
    for i in 0..8 {
        triangles.push([0, ring[i + 1], ring[i]]);
        boundary_pairs.push((ring[i], ring[i + 1]));
    }
    boundary_pairs.push((0, 1)); // right slit face
    boundary_pairs.push((0, 9)); // left slit face
    all_clamped(vertices, triangles, boundary_pairs)
}

/// L-shape with mixed boundary conditions on a half-unit grid.
///
/// Clamped on the two re-entrant edges, simply supported on the two boundary
/// halves next to the corner (-1,-1), free elsewhere. The grid resolves the
/// label transition points and contains the point-load location (-1/2,-1/2)
/// as an initial vertex.
pub fn l_shape_mixed() -> Triangulation {
    let h = 0.5;
    let coords: Vec<f64> = (0..5).map(|i| -1.0 + h * i as f64).collect();
    let mut vertices = Vec::new();
    let mut id = std::collections::BTreeMap::new();
    for (j, &y) in coords.iter().enumerate() {
        for (i, &x) in coords.iter().enumerate() {
            if x >= 0.0 && y >= 0.0 && (x > 0.0 || y > 0.0) && !(x == 0.0 && y == 0.0) {
                // hole [0,1)^2 except its lower-left boundary (re-entrant edges)
                if x > 0.0 && y > 0.0 {
                    continue;
                }
                if x > 0.0 && y == 0.0 || x == 0.0 && y > 0.0 {
                    // points on the re-entrant edges stay
                } else {
                    continue;
                }
            }
            id.insert((i, j), vertices.len());
            vertices.push(Vec2::new(x, y));
        }
    }
    let mut triangles = Vec::new();
    for j in 0..4 {
        for i in 0..4 {
            let cell_in_hole = coords[i] >= 0.0 && coords[j] >= 0.0;
            if cell_in_hole {
                continue;
            }
            let v00 = id[&(i, j)];
            let v10 = id[&(i + 1, j)];
            let v11 = id[&(i + 1, j + 1)];
            let v01 = id[&(i, j + 1)];
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    // boundary edges with labels by midpoint location
    let mut counts = std::collections::BTreeMap::new();
    for t in &triangles {
        for k in 0..3 {
            let a = t[(k + 1) % 3];
            let b = t[(k + 2) % 3];
            *counts.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
        }
    }
    let mut boundary = Vec::new();
    for (&(a, b), &n) in &counts {
        if n != 1 {
            continue;
        }
        let m = 0.5 * (vertices[a] + vertices[b]);
        let label = if (m.x == 0.0 && m.y > 0.0) || (m.y == 0.0 && m.x > 0.0) {
            BoundaryLabel::Clamped
        } else if (m.x == -1.0 && m.y < -0.5) || (m.y == -1.0 && m.x < -0.5) {
            BoundaryLabel::SimplySupported
        } else {
            BoundaryLabel::Free
        };
        boundary.push(BoundaryEdge { v: (a, b), label });
    }
    Triangulation::from_parts(vertices, triangles, boundary).expect("valid benchmark mesh")
}

/// Single reference-like triangle, all boundary clamped (test fixture).
pub fn single_triangle() -> Triangulation {
    all_clamped(
        vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
        vec![[0, 1, 2]],
        vec![(0, 1), (1, 2), (2, 0)],
    )
}
