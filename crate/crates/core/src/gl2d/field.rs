use std::sync::Arc;

use num_complex::Complex64;

use super::mesh::{polygon_area, Mesh2D};
use super::potential::VectorField;
use crate::error::{Error, Result};
use crate::params::ProblemParams;

/// Order parameter on a mesh together with the frozen vector potential, stored
/// as link phases `theta_e = eps^-2 int_e A . dl` along every edge.
#[derive(Debug, Clone)]
pub struct Field2D {
    pub mesh: Arc<Mesh2D>,
    pub psi: Vec<Complex64>,
    /// `A` sampled at the nodes.
    pub a: Vec<[f64; 2]>,
    pub theta: Vec<f64>,
    /// `exp(i theta_e)`.
    pub link: Vec<Complex64>,
    pub params: ProblemParams,
    /// `(b/eps^4) int |curl A - 1|^2`, constant for a frozen field.
    pub curl_energy: f64,
    /// `max |curl A - 1|` over primal faces.
    pub curl_error: f64,
}

impl Field2D {
    pub fn new(mesh: Arc<Mesh2D>, params: &ProblemParams, psi: Vec<Complex64>, field: &dyn VectorField) -> Result<Self> {
        if psi.len() != mesh.n_nodes() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values, mesh has {} nodes",
                psi.len(),
                mesh.n_nodes()
            )));
        }
        let eps2 = params.eps * params.eps;
        let theta: Vec<f64> = (0..mesh.n_edges())
            .map(|e| {
                let (a, b) = (mesh.edge_a[e] as usize, mesh.edge_b[e] as usize);
                field.line_integral(mesh.nodes[a], mesh.nodes[b]) / eps2
            })
            .collect();
        let link = theta.iter().map(|t| Complex64::from_polar(1.0, *t)).collect();
        let a = mesh.nodes.iter().map(|p| field.value(*p)).collect();

        let mut curl_energy = 0.0;
        let mut curl_error: f64 = 0.0;
        for face in &mesh.faces {
            let pts: Vec<[f64; 2]> = face.iter().map(|&i| mesh.nodes[i as usize]).collect();
            let area = polygon_area(&pts);
            let n = pts.len();
            let circ: f64 = (0..n).map(|i| field.line_integral(pts[i], pts[(i + 1) % n])).sum();
            let c = circ / area - 1.0;
            curl_error = curl_error.max(c.abs());
            curl_energy += area * c * c;
        }
        curl_energy *= params.b / (eps2 * eps2);
        Ok(Self {
            mesh,
            psi,
            a,
            theta,
            link,
            params: *params,
            curl_energy,
            curl_error,
        })
    }

    pub fn with_psi(&self, psi: Vec<Complex64>) -> Self {
        assert_eq!(psi.len(), self.psi.len());
        Self { psi, ..self.clone() }
    }

    /// Coefficient of `|psi|^4 - 2|psi|^2` in the energy density.
    pub(crate) fn potential_coefficient(&self) -> f64 {
        1.0 / (2.0 * self.params.b * self.params.eps * self.params.eps)
    }

    pub fn modulus(&self) -> Vec<f64> {
        self.psi.iter().map(|z| z.norm()).collect()
    }

    /// `int |psi|^2`.
    pub fn mass(&self) -> f64 {
        self.psi
            .iter()
            .zip(&self.mesh.area)
            .map(|(z, a)| a * z.norm_sqr())
            .sum()
    }
}

/// `sum_e w_e |psi_b e^{i theta_e} - psi_a|^2 + sum_n A_n (|psi|^4 - 2|psi|^2)/(2 b eps^2)`
/// plus the (constant) curl penalty.
pub fn gl_energy(field: &Field2D) -> f64 {
    energy_of(field, &field.psi)
}

pub(crate) fn energy_of(field: &Field2D, psi: &[Complex64]) -> f64 {
    let m = &field.mesh;
    let mut kin = 0.0;
    for e in 0..m.n_edges() {
        let (a, b) = (m.edge_a[e] as usize, m.edge_b[e] as usize);
        kin += m.edge_w[e] * (psi[b] * field.link[e] - psi[a]).norm_sqr();
    }
    let c = field.potential_coefficient();
    let mut pot = 0.0;
    for (z, area) in psi.iter().zip(&m.area) {
        let r2 = z.norm_sqr();
        pot += area * (r2 * r2 - 2.0 * r2);
    }
    kin + c * pot + field.curl_energy
}

/// Energy and its gradient with respect to `(Re psi, Im psi)`, packed as complex.
pub(crate) fn energy_gradient(field: &Field2D, psi: &[Complex64], grad: &mut [Complex64]) -> f64 {
    let m = &field.mesh;
    let c = field.potential_coefficient();
    let mut pot = 0.0;
    for i in 0..psi.len() {
        let z = psi[i];
        let r2 = z.norm_sqr();
        let a = m.area[i];
        pot += a * (r2 * r2 - 2.0 * r2);
        grad[i] = z * (4.0 * c * a * (r2 - 1.0));
    }
    let mut kin = 0.0;
    for e in 0..m.n_edges() {
        let (a, b) = (m.edge_a[e] as usize, m.edge_b[e] as usize);
        let w = m.edge_w[e];
        let l = field.link[e];
        let d = psi[b] * l - psi[a];
        kin += w * d.norm_sqr();
        let g = d * (2.0 * w);
        grad[b] += g * l.conj();
        grad[a] -= g;
    }
    kin + c * pot + field.curl_energy
}

/// Coefficients `c0..c4` of `lambda -> E(psi + lambda p)` (without the curl constant).
pub(crate) fn line_quartic(field: &Field2D, psi: &[Complex64], p: &[Complex64]) -> [f64; 5] {
    let m = &field.mesh;
    let mut q = [0.0; 5];
    for e in 0..m.n_edges() {
        let (a, b) = (m.edge_a[e] as usize, m.edge_b[e] as usize);
        let w = m.edge_w[e];
        let l = field.link[e];
        let d0 = psi[b] * l - psi[a];
        let d1 = p[b] * l - p[a];
        q[0] += w * d0.norm_sqr();
        q[1] += 2.0 * w * (d0.conj() * d1).re;
        q[2] += w * d1.norm_sqr();
    }
    let c = field.potential_coefficient();
    let mut r = [0.0; 5];
    for i in 0..psi.len() {
        let ar = m.area[i];
        let a = psi[i].norm_sqr();
        let beta = (psi[i].conj() * p[i]).re;
        let gamma = p[i].norm_sqr();
        r[0] += ar * (a * a - 2.0 * a);
        r[1] += ar * (4.0 * a * beta - 4.0 * beta);
        r[2] += ar * (4.0 * beta * beta + 2.0 * a * gamma - 2.0 * gamma);
        r[3] += ar * 4.0 * beta * gamma;
        r[4] += ar * gamma * gamma;
    }
    for i in 0..5 {
        q[i] += c * r[i];
    }
    q
}
