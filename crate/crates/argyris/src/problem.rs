//! Problem data: volume sources with point loads, boundary data.

use crate::mesh::{Triangulation, VertexId};
use crate::poly::Poly5;
use crate::{Mat2, Vec2};
use std::sync::Arc;

/// Boundary datum with two derivatives everywhere and third derivatives
/// along boundary edges (for the oscillation terms).
///
/// All methods take a witness point strictly inside the domain next to `p`;
/// data on slit domains is two-sided and the witness selects the face. Data
/// defined by a single-valued expression may ignore it.
pub trait BoundaryDatum: Send + Sync {
    fn value(&self, p: Vec2, witness: Vec2) -> f64;
    fn gradient(&self, p: Vec2, witness: Vec2) -> Vec2;
    fn hessian(&self, p: Vec2, witness: Vec2) -> Mat2;
    /// Third directional derivative along d1, d2, d3.
    fn third(&self, p: Vec2, witness: Vec2, d1: Vec2, d2: Vec2, d3: Vec2) -> f64;

    fn is_zero(&self) -> bool {
        false
    }
}

/// Homogeneous boundary data.
pub struct ZeroDatum;

impl BoundaryDatum for ZeroDatum {
    fn value(&self, _: Vec2, _: Vec2) -> f64 {
        0.0
    }
    fn gradient(&self, _: Vec2, _: Vec2) -> Vec2 {
        Vec2::zeros()
    }
    fn hessian(&self, _: Vec2, _: Vec2) -> Mat2 {
        Mat2::zeros()
    }
    fn third(&self, _: Vec2, _: Vec2, _: Vec2, _: Vec2, _: Vec2) -> f64 {
        0.0
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// Polynomial datum (exact derivatives of a global quintic).
pub struct PolyDatum(pub Poly5);

impl BoundaryDatum for PolyDatum {
    fn value(&self, p: Vec2, _: Vec2) -> f64 {
        self.0.eval(p)
    }
    fn gradient(&self, p: Vec2, _: Vec2) -> Vec2 {
        Vec2::new(self.0.dx().eval(p), self.0.dy().eval(p))
    }
    fn hessian(&self, p: Vec2, _: Vec2) -> Mat2 {
        let hxx = self.0.dx().dx().eval(p);
        let hxy = self.0.dx().dy().eval(p);
        let hyy = self.0.dy().dy().eval(p);
        Mat2::new(hxx, hxy, hxy, hyy)
    }
    fn third(&self, p: Vec2, _: Vec2, d1: Vec2, d2: Vec2, d3: Vec2) -> f64 {
        self.0
            .deriv_dir(d1)
            .deriv_dir(d2)
            .deriv_dir(d3)
            .eval(p)
    }
}

/// Square-integrable part of the source.
#[derive(Clone)]
pub enum SmoothSource {
    Zero,
    Constant(f64),
    Function(Arc<dyn Fn(Vec2) -> f64 + Send + Sync>),
}

impl SmoothSource {
    pub fn eval(&self, p: Vec2) -> f64 {
        match self {
            SmoothSource::Zero => 0.0,
            SmoothSource::Constant(c) => *c,
            SmoothSource::Function(f) => f(p),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SmoothSource::Zero)
    }
}

/// Load functional: an L2 density plus point forces supported on vertices of
/// the initial triangulation.
#[derive(Clone)]
pub struct SourceTerm {
    pub smooth: SmoothSource,
    pub point_loads: Vec<(VertexId, f64)>,
}

impl SourceTerm {
    pub fn zero() -> Self {
        SourceTerm {
            smooth: SmoothSource::Zero,
            point_loads: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        SourceTerm {
            smooth: SmoothSource::Constant(c),
            point_loads: Vec::new(),
        }
    }

    pub fn point_load(vertex: VertexId, weight: f64) -> Self {
        SourceTerm {
            smooth: SmoothSource::Zero,
            point_loads: vec![(vertex, weight)],
        }
    }

    /// Point loads must sit on vertices of the initial triangulation.
    pub fn compatible_with(&self, mesh: &Triangulation) -> bool {
        self.point_loads
            .iter()
            .all(|&(v, _)| mesh.is_initial_vertex(v))
    }
}
