//! Adaptive quintic C¹ finite elements for the biharmonic plate problem.
//!
//! The crate implements the full toolchain for fourth-order plate bending on
//! polygonal domains with mixed clamped/simply-supported/free boundaries:
//!
//! - newest-vertex-bisection triangulations with per-vertex coordinate frames
//!   ([`mesh`]),
//! - the quintic Argyris element in its standard and hierarchical (extended)
//!   variants, including dof maps, nodal interpolation and prolongation
//!   ([`element`]),
//! - stiffness/load assembly and a sparse direct solver ([`assembly`]),
//! - the residual a posteriori error indicator with boundary-data
//!   oscillations ([`estimator`]),
//! - bulk marking of minimal cardinality and the adaptive loop
//!   ([`adaptivity`]),
//! - a local multigrid V(r)-cycle with Gauß-Seidel smoothing on new degrees
//!   of freedom, MG/PCG drivers and an algebraic error estimate
//!   ([`multilevel`]),
//! - benchmark problems and a command line front end ([`driver`]).

pub mod adaptivity;
pub mod assembly;
pub mod driver;
pub mod element;
pub mod estimator;
pub mod mesh;
pub mod multilevel;
pub mod poly;
pub mod problem;
pub mod quadrature;
pub mod sparse;

/// 2D point or direction.
pub type Vec2 = nalgebra::Vector2<f64>;
/// 2x2 matrix (Jacobians, Hessians).
pub type Mat2 = nalgebra::Matrix2<f64>;

/// Rotate a vector by -90 degrees: (x, y) -> (y, -x).
#[inline]
pub fn rot_minus_90(v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

/// Rotate a vector by +90 degrees: (x, y) -> (-y, x).
#[inline]
pub fn rot_plus_90(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}
