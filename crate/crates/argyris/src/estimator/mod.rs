//! Residual a posteriori error indicator.
//!
//! Per triangle the indicator collects the volume residual of the fourth
//! order equation, normal-normal second derivative jumps over the edges not
//! carrying clamped conditions, the combined third-order jump over edges
//! without essential conditions, and the boundary-data oscillations of its
//! edge patch. Point forces contribute nothing: the cut-off functions of the
//! efficiency proof vanish at vertices, and loads sit on vertices of the
//! initial mesh.

use crate::element::{FeFunction, FeSpace};
use crate::mesh::{BoundaryLabel, EdgeId, TriId};
use crate::problem::{BoundaryDatum, SmoothSource, SourceTerm};
use crate::quadrature::{edge_rule, p2_projection_defect_sq, triangle_rule, EdgeRule};
use crate::Vec2;

/// Gauss points for polynomial jump integrands (degree <= 6).
const JUMP_POINTS: usize = 8;
/// Gauss points for oscillation integrals of non-polynomial data.
const OSC_POINTS: usize = 16;

/// Per-triangle indicator with its component breakdown.
#[derive(Clone, Copy, Debug, Default)]
pub struct TriIndicator {
    pub volume: f64,
    pub jump_nn: f64,
    pub jump_third: f64,
    pub oscillation: f64,
}

impl TriIndicator {
    pub fn total(&self) -> f64 {
        self.volume + self.jump_nn + self.jump_third + self.oscillation
    }
}

/// Squared refinement indicators of a discrete solution.
#[derive(Clone, Debug)]
pub struct IndicatorField {
    pub per_tri: Vec<TriIndicator>,
}

impl IndicatorField {
    /// eta^2 restricted to one triangle.
    pub fn local_sq(&self, t: TriId) -> f64 {
        self.per_tri[t].total()
    }

    /// Sum of all squared indicators.
    pub fn total_sq(&self) -> f64 {
        self.per_tri.iter().map(|t| t.total()).sum()
    }

    pub fn eta(&self) -> f64 {
        self.total_sq().sqrt()
    }

    pub fn values_sq(&self) -> Vec<f64> {
        self.per_tri.iter().map(|t| t.total()).collect()
    }
}

/// Oscillation contributions of one boundary edge.
#[derive(Clone, Copy, Debug, Default)]
pub struct EdgeOscillation {
    pub edge: EdgeId,
    /// |E|^3 || (1 - Pi_2) d^3_ttn g ||^2, clamped edges only.
    pub ttn: f64,
    /// |E|^3 || (1 - Pi_2) d^3_ttt g ||^2, clamped and simply supported.
    pub ttt: f64,
}

impl EdgeOscillation {
    pub fn total(&self) -> f64 {
        self.ttn + self.ttt
    }
}

/// Boundary-data oscillations of a set of edges; edges outside the essential
/// boundary contribute zero entries.
pub fn boundary_osc(space: &FeSpace, edges: &[EdgeId], g: &dyn BoundaryDatum) -> Vec<EdgeOscillation> {
    let rule = edge_rule(OSC_POINTS);
    edges
        .iter()
        .map(|&e| edge_oscillation(space, e, g, &rule))
        .collect()
}

fn edge_oscillation(
    space: &FeSpace,
    e: EdgeId,
    g: &dyn BoundaryDatum,
    rule: &EdgeRule,
) -> EdgeOscillation {
    let edge = &space.topo.edges[e];
    let label = match edge.label {
        Some(l) => l,
        None => return EdgeOscillation { edge: e, ..Default::default() },
    };
    if label == BoundaryLabel::Free || g.is_zero() {
        return EdgeOscillation { edge: e, ..Default::default() };
    }
    let witness = space.mesh.centroid(edge.tri_plus);
    let (pa, pb) = (
        space.mesh.vertices[edge.v.0],
        space.mesh.vertices[edge.v.1],
    );
    let (tau, nu) = (edge.tangent, edge.normal);
    let len = edge.length;
    let weight = len.powi(3);
    let samples = |d3: &dyn Fn(Vec2) -> f64| -> f64 {
        let values: Vec<f64> = rule
            .points
            .iter()
            .map(|&s| d3(pa + s * (pb - pa)))
            .collect();
        weight * p2_projection_defect_sq(rule, &values, len)
    };
    let ttt = samples(&|x| g.third(x, witness, tau, tau, tau));
    let ttn = if label == BoundaryLabel::Clamped {
        samples(&|x| g.third(x, witness, tau, tau, nu))
    } else {
        0.0
    };
    EdgeOscillation { edge: e, ttn, ttt }
}

/// Squared jump integrals of one edge: the normal-normal second derivative
/// and the combined third-order term. Boundary edges use the one-sided
/// trace. Signs of (tau, nu) do not matter: the integrands are squared.
pub(crate) fn edge_jump_integrals(
    space: &FeSpace,
    e: EdgeId,
    u: &FeFunction,
    rule: &EdgeRule,
    tau: Vec2,
    nu: Vec2,
) -> (f64, f64) {
    let edge = &space.topo.edges[e];
    let (pa, pb) = (
        space.mesh.vertices[edge.v.0],
        space.mesh.vertices[edge.v.1],
    );
    let side = |t: TriId| {
        let poly = u.local_polynomial(space, t);
        let nu_hat = poly.geom.pull_direction(nu);
        let tau_hat = poly.geom.pull_direction(tau);
        let nn = poly.poly.deriv_dir(nu_hat).deriv_dir(nu_hat);
        let mut third = poly.poly.deriv_dir(tau_hat).deriv_dir(tau_hat).deriv_dir(nu_hat);
        let lap = poly.laplacian_poly();
        third.add_scaled(&lap.deriv_dir(nu_hat), 1.0);
        (poly.geom, nn, third)
    };
    let plus = side(edge.tri_plus);
    let minus = edge.tri_minus.map(side);
    let (mut jnn, mut j3) = (0.0, 0.0);
    for (&s, &w) in rule.points.iter().zip(&rule.weights) {
        let x = pa + s * (pb - pa);
        let xp = plus.0.to_reference(x);
        let (mut dnn, mut d3) = (plus.1.eval(xp), plus.2.eval(xp));
        if let Some(m) = &minus {
            let xm = m.0.to_reference(x);
            dnn -= m.1.eval(xm);
            d3 -= m.2.eval(xm);
        }
        jnn += w * dnn * dnn;
        j3 += w * d3 * d3;
    }
    (jnn * edge.length, j3 * edge.length)
}

/// Evaluate the refinement indicator of `u_h` for the given data.
pub fn estimate(
    space: &FeSpace,
    u_h: &FeFunction,
    source: &SourceTerm,
    g: &dyn BoundaryDatum,
) -> Result<IndicatorField, crate::assembly::AssemblyError> {
    if u_h.coeffs.len() != space.n_dofs() {
        return Err(crate::assembly::AssemblyError::MeshMismatch);
    }
    let n_tri = space.mesh.triangles.len();
    let tri_rule = triangle_rule(crate::assembly::ASSEMBLY_DEGREE);
    let jump_rule = edge_rule(JUMP_POINTS);
    let osc_rule = edge_rule(OSC_POINTS);

    // per-edge quantities, each computed once
    let n_edges = space.topo.edges.len();
    let mut jnn = vec![0.0f64; n_edges];
    let mut j3 = vec![0.0f64; n_edges];
    let mut osc = vec![EdgeOscillation::default(); n_edges];
    for e in 0..n_edges {
        let edge = &space.topo.edges[e];
        let needs_nn = edge.label != Some(BoundaryLabel::Clamped);
        let needs_third = !matches!(
            edge.label,
            Some(BoundaryLabel::Clamped) | Some(BoundaryLabel::SimplySupported)
        );
        if needs_nn || needs_third {
            let (a, b) = edge_jump_integrals(space, e, u_h, &jump_rule, edge.tangent, edge.normal);
            if needs_nn {
                jnn[e] = a;
            }
            if needs_third {
                j3[e] = b;
            }
        }
        if edge.label.is_some() {
            osc[e] = edge_oscillation(space, e, g, &osc_rule);
        }
    }

    let mut per_tri = Vec::with_capacity(n_tri);
    for t in 0..n_tri {
        let poly = u_h.local_polynomial(space, t);
        let area = space.mesh.area(t);
        let bilap = poly.bilaplacian_poly();
        let det = poly.geom.det.abs();
        let mut vol = 0.0;
        for (&q, &w) in tri_rule.points.iter().zip(&tri_rule.weights) {
            let x = poly.geom.to_physical(q);
            let r = source.smooth.eval(x) - bilap.eval(q);
            vol += w * det * r * r;
        }
        let mut ind = TriIndicator {
            volume: area * area * vol,
            ..Default::default()
        };
        for &e in &space.topo.tri_edges[t] {
            ind.jump_nn += area.sqrt() * jnn[e];
            ind.jump_third += area.powf(1.5) * j3[e];
            ind.oscillation += osc[e].total();
        }
        per_tri.push(ind);
    }
    Ok(IndicatorField { per_tri })
}

/// Data oscillation of the volume load: sum over triangles of
/// || h_T^2 (1 - Pi_{T,0}) f ||_{L^2(T)}.
pub fn oscillation_f(space: &FeSpace, f: &SmoothSource) -> f64 {
    (0..space.mesh.triangles.len())
        .map(|t| {
            let h = space.mesh.diameter(t);
            h * h * p0_defect_sq(space, t, f).sqrt()
        })
        .sum()
}

/// || (1 - Pi_{T,0}) f ||^2_{L^2(T)} by quadrature.
pub fn p0_defect_sq(space: &FeSpace, t: TriId, f: &SmoothSource) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    if matches!(f, SmoothSource::Constant(_)) {
        return 0.0;
    }
    let rule = triangle_rule(crate::assembly::ASSEMBLY_DEGREE);
    let geom = crate::element::ElementGeometry::new(&space.mesh, t).expect("valid mesh");
    let det = geom.det.abs();
    let (mut mass, mut mean, mut sq) = (0.0, 0.0, 0.0);
    for (&q, &w) in rule.points.iter().zip(&rule.weights) {
        let v = f.eval(geom.to_physical(q));
        mass += w * det;
        mean += w * det * v;
        sq += w * det * v * v;
    }
    let m = mean / mass;
    (sq - 2.0 * m * mean + m * m * mass).max(0.0)
}
