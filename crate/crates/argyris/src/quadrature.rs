//! Quadrature on the reference triangle and on edges.
//!
//! Triangle rules come from tensor Gauss-Legendre rules collapsed onto the
//! triangle (Duffy map), which keeps every weight positive and integrates
//! polynomials exactly up to the requested degree. Edge rules are plain
//! Gauss-Legendre on the unit interval.

use crate::Vec2;

/// Quadrature rule on the reference triangle conv{(0,0),(1,0),(0,1)}.
///
/// Weights sum to the reference area 1/2 and the rule is exact for all
/// polynomials of total degree <= `degree`.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Gauss rule on the unit interval [0,1]; weights sum to one.
#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // symmetrise: nodes come out ordered from +1 to -1; return ascending
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss rule with `n` points mapped to [0,1].
pub fn edge_rule(n: usize) -> EdgeRule {
    let (xs, ws) = gauss_legendre(n);
    EdgeRule {
        points: xs.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: ws.iter().map(|w| 0.5 * w).collect(),
    }
}

/// Triangle rule exact to (at least) the given polynomial degree.
///
/// The Duffy substitution x = u, y = v(1-u) turns \int_T x^a y^b into a
/// polynomial of degree a+b+1 in u and b in v, so a 1D rule with
/// 2n-1 >= degree+1 suffices in both directions.
pub fn triangle_rule(degree: usize) -> TriangleRule {
    let n = (degree + 3) / 2; // smallest n with 2n-1 >= degree+1
    let line = edge_rule(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (i, &u) in line.points.iter().enumerate() {
        for (j, &v) in line.points.iter().enumerate() {
            points.push(Vec2::new(u, v * (1.0 - u)));
            weights.push(line.weights[i] * line.weights[j] * (1.0 - u));
        }
    }
    TriangleRule {
        points,
        weights,
        degree,
    }
}

/// Shifted Legendre polynomials on [0,1], orthonormal in L2(0,1).
#[inline]
pub fn orthonormal_p2(t: f64) -> [f64; 3] {
    [
        1.0,
        (3.0f64).sqrt() * (2.0 * t - 1.0),
        (5.0f64).sqrt() * (6.0 * t * t - 6.0 * t + 1.0),
    ]
}

/// Squared L2(E) distance of `f` (sampled at the rule nodes of an edge of
/// length `len`) from its L2 projection onto quadratics.
pub fn p2_projection_defect_sq(rule: &EdgeRule, values: &[f64], len: f64) -> f64 {
    let mut norm_sq = 0.0;
    let mut moments = [0.0; 3];
    for (k, (&t, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
        let f = values[k];
        norm_sq += w * f * f;
        let p = orthonormal_p2(t);
        for j in 0..3 {
            moments[j] += w * f * p[j];
        }
    }
    let defect = norm_sq - moments.iter().map(|m| m * m).sum::<f64>();
    // guard tiny negative round-off
    len * defect.max(0.0)
}
