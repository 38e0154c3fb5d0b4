//! Plain-text mesh format.
//!
//! ```text
//! v x y          # vertex, 17 significant digits
//! t i j k r      # triangle with refinement-edge local index r
//! b i j LABEL    # boundary edge, LABEL in {Clamped, SimplySupported, Free}
//! ```
//!
//! Loading yields a level-0 mesh; genealogy is not serialised.

use super::{BoundaryEdge, BoundaryLabel, MeshError, Triangle, Triangulation};
use crate::Vec2;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

pub fn save_mesh(mesh: &Triangulation, path: &Path) -> Result<(), MeshError> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    for v in &mesh.vertices {
        writeln!(out, "v {:.16e} {:.16e}", v.x, v.y)?;
    }
    for t in &mesh.triangles {
        writeln!(out, "t {} {} {} {}", t.v[0], t.v[1], t.v[2], t.refine_edge)?;
    }
    for b in &mesh.boundary {
        writeln!(out, "b {} {} {}", b.v.0, b.v.1, b.label)?;
    }
    Ok(())
}

pub fn load_mesh(path: &Path) -> Result<Triangulation, MeshError> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut boundary = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap();
        let fields: Vec<&str> = parts.collect();
        let parse_err = |detail: String| MeshError::Parse {
            line: lineno + 1,
            detail,
        };
        match tag {
            "v" => {
                if fields.len() != 2 {
                    return Err(parse_err("vertex line needs two coordinates".into()));
                }
                let x: f64 = fields[0].parse().map_err(|e| parse_err(format!("{e}")))?;
                let y: f64 = fields[1].parse().map_err(|e| parse_err(format!("{e}")))?;
                vertices.push(Vec2::new(x, y));
            }
            "t" => {
                if fields.len() != 4 {
                    return Err(parse_err("triangle line needs four indices".into()));
                }
                let idx: Result<Vec<usize>, _> = fields.iter().map(|f| f.parse()).collect();
                let idx = idx.map_err(|e| parse_err(format!("{e}")))?;
                if idx[3] > 2 {
                    return Err(parse_err("refinement edge index out of range".into()));
                }
                triangles.push(Triangle {
                    v: [idx[0], idx[1], idx[2]],
                    refine_edge: idx[3] as u8,
                });
            }
            "b" => {
                if fields.len() != 3 {
                    return Err(parse_err("boundary line needs two indices and a label".into()));
                }
                let i: usize = fields[0].parse().map_err(|e| parse_err(format!("{e}")))?;
                let j: usize = fields[1].parse().map_err(|e| parse_err(format!("{e}")))?;
                let label = match fields[2] {
                    "Clamped" => BoundaryLabel::Clamped,
                    "SimplySupported" => BoundaryLabel::SimplySupported,
                    "Free" => BoundaryLabel::Free,
                    other => return Err(parse_err(format!("unknown boundary label `{other}`"))),
                };
                boundary.push(BoundaryEdge { v: (i, j), label });
            }
            other => return Err(parse_err(format!("unknown line tag `{other}`"))),
        }
    }
    let n = vertices.len();
    let mesh = Triangulation {
        vertices,
        triangles,
        boundary,
        level: 0,
        provenance: None,
        num_initial_vertices: n,
        vertex_parent_edge: vec![None; n],
    };
    mesh.validate()?;
    Ok(mesh)
}
