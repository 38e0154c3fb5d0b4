//! Bivariate polynomials of total degree at most five.
//!
//! All element-local quantities (basis functions, discrete solutions and
//! their derivatives up to fourth order) are manipulated as exact polynomials
//! in reference coordinates; derivatives are taken symbolically so that jump
//! and residual terms of the error indicator never rely on differencing.

use crate::Vec2;

/// Number of monomials x^i y^j with i + j <= 5.
pub const N_MONOMIALS: usize = 21;

/// Start of the degree-d block in the monomial ordering.
const BASE: [usize; 6] = [0, 1, 3, 6, 10, 15];

/// Index of x^(d-j) y^j in the coefficient array.
#[inline]
pub fn monomial_index(i: usize, j: usize) -> usize {
    BASE[i + j] + j
}

/// Polynomial of total degree <= 5 in monomial form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Poly5 {
    pub c: [f64; N_MONOMIALS],
}

impl Poly5 {
    pub fn zero() -> Self {
        Poly5 {
            c: [0.0; N_MONOMIALS],
        }
    }

    pub fn monomial(i: usize, j: usize) -> Self {
        let mut p = Self::zero();
        p.c[monomial_index(i, j)] = 1.0;
        p
    }

    pub fn eval(&self, p: Vec2) -> f64 {
        let (x, y) = (p.x, p.y);
        let mut xp = [1.0; 6];
        let mut yp = [1.0; 6];
        for k in 1..6 {
            xp[k] = xp[k - 1] * x;
            yp[k] = yp[k - 1] * y;
        }
        let mut val = 0.0;
        for d in 0..=5 {
            for j in 0..=d {
                val += self.c[BASE[d] + j] * xp[d - j] * yp[j];
            }
        }
        val
    }

    pub fn dx(&self) -> Self {
        let mut out = Self::zero();
        for d in 1..=5 {
            for j in 0..d {
                let i = d - j; // power of x, >= 1
                out.c[monomial_index(i - 1, j)] += self.c[BASE[d] + j] * i as f64;
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let mut out = Self::zero();
        for d in 1..=5 {
            for j in 1..=d {
                out.c[monomial_index(d - j, j - 1)] += self.c[BASE[d] + j] * j as f64;
            }
        }
        out
    }

    /// Directional derivative w.x * dx + w.y * dy as a polynomial.
    pub fn deriv_dir(&self, w: Vec2) -> Self {
        let mut out = Self::zero();
        let px = self.dx();
        let py = self.dy();
        for k in 0..N_MONOMIALS {
            out.c[k] = w.x * px.c[k] + w.y * py.c[k];
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = *self;
        for c in &mut out.c {
            *c *= s;
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        for k in 0..N_MONOMIALS {
            self.c[k] += s * other.c[k];
        }
    }
}
