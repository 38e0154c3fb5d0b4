//! Quintic Argyris elements: reference basis, physical transformation,
//! global dof maps, finite element functions, nodal interpolation and the
//! coarse-to-fine prolongation of the hierarchical space.

mod dofmap;
mod function;
mod interpolate;
mod prolong;
pub mod reference;
mod transform;

pub use dofmap::{build_dof_map, Dof, DofKind, DofMap, DofNode, SpaceMode};
pub use function::{FeFunction, LocalPolynomial};
pub use interpolate::nodal_interpolate;
pub use prolong::{
    coarse_local_on_fine, prolong_coefficients, prolongation_matrix, standard_injection_attempt,
};
pub use transform::{physical_transform, ElementError, ElementGeometry, TransformMatrix};

use crate::mesh::{topology_and_frames, EdgeTopology, MeshError, Triangulation, VertexFrames};

/// A triangulation together with everything needed to evaluate the Argyris
/// space on it: edge topology, vertex frames and the dof map.
pub struct FeSpace {
    pub mesh: Triangulation,
    pub topo: EdgeTopology,
    pub frames: VertexFrames,
    pub dofs: DofMap,
}

#[derive(Debug)]
pub enum SpaceError {
    Mesh(MeshError),
    Element(ElementError),
}

impl std::fmt::Display for SpaceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpaceError::Mesh(e) => write!(f, "{e}"),
            SpaceError::Element(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SpaceError {}

impl From<MeshError> for SpaceError {
    fn from(e: MeshError) -> Self {
        SpaceError::Mesh(e)
    }
}

impl From<ElementError> for SpaceError {
    fn from(e: ElementError) -> Self {
        SpaceError::Element(e)
    }
}

impl FeSpace {
    pub fn new(mesh: Triangulation, mode: SpaceMode) -> Result<Self, SpaceError> {
        let (topo, frames) = topology_and_frames(&mesh)?;
        let dofs = build_dof_map(&mesh, &topo, &frames, mode)?;
        Ok(FeSpace {
            mesh,
            topo,
            frames,
            dofs,
        })
    }

    pub fn mode(&self) -> SpaceMode {
        self.dofs.mode
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.n_dofs()
    }

    pub fn n_free(&self) -> usize {
        self.dofs.n_free()
    }

    pub fn geometry(&self, t: crate::mesh::TriId) -> ElementGeometry {
        ElementGeometry::new(&self.mesh, t).expect("dof map construction validated geometry")
    }
}
