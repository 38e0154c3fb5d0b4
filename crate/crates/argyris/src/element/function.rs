//! Finite element functions and their element-local evaluation.

use super::reference::{reference, N_LOCAL_DOFS};
use super::{ElementGeometry, FeSpace};
use crate::mesh::TriId;
use crate::poly::Poly5;
use crate::{Mat2, Vec2};

/// Coefficient vector over a dof map.
#[derive(Clone, Debug)]
pub struct FeFunction {
    pub coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn zeros(space: &FeSpace) -> Self {
        FeFunction {
            coeffs: vec![0.0; space.n_dofs()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        FeFunction { coeffs }
    }

    pub fn local_coeffs(&self, space: &FeSpace, t: TriId) -> [f64; N_LOCAL_DOFS] {
        let mut c = [0.0; N_LOCAL_DOFS];
        for (k, &g) in space.dofs.tri_dofs[t].iter().enumerate() {
            c[k] = self.coeffs[g as usize];
        }
        c
    }

    /// Restriction to one triangle as a polynomial in reference coordinates.
    pub fn local_polynomial(&self, space: &FeSpace, t: TriId) -> LocalPolynomial {
        let c = self.local_coeffs(space, t);
        LocalPolynomial::from_dof_values(space, t, &c)
    }
}

/// Element-local representation u|_T = p(F^{-1}(x)) with its affine
/// geometry; all physical derivatives come from symbolic derivatives of `p`
/// along pulled-back directions.
#[derive(Clone, Debug)]
pub struct LocalPolynomial {
    pub poly: Poly5,
    pub geom: ElementGeometry,
}

impl LocalPolynomial {
    pub fn from_dof_values(space: &FeSpace, t: TriId, local: &[f64; N_LOCAL_DOFS]) -> Self {
        let re = reference();
        let m = &space.dofs.transforms[t];
        // reference-basis coefficients a = M * c, then to monomial form
        let mut poly = Poly5::zero();
        for k in 0..N_LOCAL_DOFS {
            let mut a_k = 0.0;
            for j in 0..N_LOCAL_DOFS {
                a_k += m[(k, j)] * local[j];
            }
            if a_k != 0.0 {
                poly.add_scaled(&re.basis[k], a_k);
            }
        }
        LocalPolynomial {
            poly,
            geom: space.geometry(t),
        }
    }

    #[inline]
    pub fn value_ref(&self, xhat: Vec2) -> f64 {
        self.poly.eval(xhat)
    }

    pub fn value(&self, x: Vec2) -> f64 {
        self.poly.eval(self.geom.to_reference(x))
    }

    pub fn gradient(&self, x: Vec2) -> Vec2 {
        let xhat = self.geom.to_reference(x);
        let ex = self.geom.pull_direction(Vec2::new(1.0, 0.0));
        let ey = self.geom.pull_direction(Vec2::new(0.0, 1.0));
        Vec2::new(
            self.poly.deriv_dir(ex).eval(xhat),
            self.poly.deriv_dir(ey).eval(xhat),
        )
    }

    pub fn hessian(&self, x: Vec2) -> Mat2 {
        let xhat = self.geom.to_reference(x);
        let ex = self.geom.pull_direction(Vec2::new(1.0, 0.0));
        let ey = self.geom.pull_direction(Vec2::new(0.0, 1.0));
        let px = self.poly.deriv_dir(ex);
        let hxx = px.deriv_dir(ex).eval(xhat);
        let hxy = px.deriv_dir(ey).eval(xhat);
        let hyy = self.poly.deriv_dir(ey).deriv_dir(ey).eval(xhat);
        Mat2::new(hxx, hxy, hxy, hyy)
    }

    /// Directional derivative of arbitrary order along physical directions.
    pub fn directional(&self, x: Vec2, dirs: &[Vec2]) -> f64 {
        let mut p = self.poly;
        for &d in dirs {
            p = p.deriv_dir(self.geom.pull_direction(d));
        }
        p.eval(self.geom.to_reference(x))
    }

    /// The Laplacian as a polynomial in reference coordinates.
    pub fn laplacian_poly(&self) -> Poly5 {
        let ex = self.geom.pull_direction(Vec2::new(1.0, 0.0));
        let ey = self.geom.pull_direction(Vec2::new(0.0, 1.0));
        let mut out = self.poly.deriv_dir(ex).deriv_dir(ex);
        let pyy = self.poly.deriv_dir(ey).deriv_dir(ey);
        out.add_scaled(&pyy, 1.0);
        out
    }

    /// The bilaplacian as a polynomial in reference coordinates (piecewise
    /// affine for quintic elements).
    pub fn bilaplacian_poly(&self) -> Poly5 {
        let lap = LocalPolynomial {
            poly: self.laplacian_poly(),
            geom: self.geom,
        };
        lap.laplacian_poly()
    }
}
