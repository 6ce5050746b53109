use std::f64::consts::PI;

use super::field::Field2D;
use crate::boundary::ReferenceProfile;
use crate::error::{Error, Result};
use crate::profile1d::Profile1D;

/// `|| |Psi|^2 - g_ref^2(s, tau/eps) ||_{L^2}` and `|| g_ref^2 ||_{L^2}`.
pub fn density_errors(field: &Field2D, reference: &ReferenceProfile) -> (f64, f64) {
    let mesh = &field.mesh;
    let eps = field.params.eps;
    let (mut err, mut norm) = (0.0, 0.0);
    for i in 0..mesh.n_nodes() {
        let (s, tau) = mesh.tubular(i);
        let g = reference.eval(s, tau / eps);
        let g2 = g * g;
        let d = field.psi[i].norm_sqr() - g2;
        err += mesh.area[i] * d * d;
        norm += mesh.area[i] * g2 * g2;
    }
    (err.sqrt(), norm.sqrt())
}

pub fn density_l2_error(field: &Field2D, reference: &ReferenceProfile) -> f64 {
    density_errors(field, reference).0
}

/// `sup | |Psi| - f0(tau/eps) |` over nodes with `f0(tau/eps) >= gamma`.
pub fn pan_uniform_error(field: &Field2D, f0: &Profile1D, gamma: f64) -> Result<f64> {
    let mesh = &field.mesh;
    let eps = field.params.eps;
    let mut sup: f64 = 0.0;
    let mut count = 0;
    for i in 0..mesh.n_nodes() {
        let (_, tau) = mesh.tubular(i);
        let f = f0.eval(tau / eps);
        if f >= gamma {
            count += 1;
            sup = sup.max((field.psi[i].norm() - f).abs());
        }
    }
    if count == 0 {
        return Err(Error::EmptyRegion { gamma });
    }
    Ok(sup)
}

/// `max over the boundary of | |Psi| - f0(0) |`.
pub fn pan_boundary_error(field: &Field2D, f0: &Profile1D) -> f64 {
    let f = f0.values[0];
    field.mesh
        .boundary_nodes()
        .map(|i| (field.psi[i].norm() - f).abs())
        .fold(0.0, f64::max)
}

fn boundary_min_modulus(field: &Field2D) -> f64 {
    field.mesh
        .boundary_nodes()
        .map(|i| field.psi[i].norm())
        .fold(f64::INFINITY, f64::min)
}

/// Degree of `Psi` along the boundary: the sum of principal-value phase
/// increments `arg(Psi_{j+1}/Psi_j)` over boundary edges, divided by `2 pi`.
pub fn winding_number(field: &Field2D) -> Result<i64> {
    let min_modulus = boundary_min_modulus(field);
    if !(min_modulus > 0.0) {
        return Err(Error::ZeroOnBoundary { min_modulus });
    }
    let n = field.mesh.n_s;
    let total: f64 = (0..n)
        .map(|j| {
            let z = field.psi[(j + 1) % n] * field.psi[j].conj();
            z.im.atan2(z.re)
        })
        .sum();
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Gauge-covariant variant: increments of `arg(conj(Psi_j) Psi_{j+1} e^{i theta})`
/// minus the flux through the links. Agrees with [`winding_number`] whenever the
/// raw increments are resolved (below pi in magnitude).
pub fn covariant_winding(field: &Field2D) -> Result<i64> {
    let min_modulus = boundary_min_modulus(field);
    if !(min_modulus > 0.0) {
        return Err(Error::ZeroOnBoundary { min_modulus });
    }
    let mesh = &field.mesh;
    // Boundary tangential edges are the first edge of every column on ring 0.
    let mut total = 0.0;
    for e in 0..mesh.n_edges() {
        let (a, b) = (mesh.edge_a[e] as usize, mesh.edge_b[e] as usize);
        if a < mesh.n_s && b < mesh.n_s {
            let z = field.psi[a].conj() * field.psi[b] * field.link[e];
            total += z.im.atan2(z.re) - field.theta[e];
        }
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Fraction of `int |Psi|^2` carried by nodes deeper than `depth`.
pub fn mass_beyond(field: &Field2D, depth: f64) -> f64 {
    let mesh = &field.mesh;
    let (mut deep, mut total) = (0.0, 0.0);
    for i in 0..mesh.n_nodes() {
        let m = mesh.area[i] * field.psi[i].norm_sqr();
        total += m;
        if mesh.tubular(i).1 > depth {
            deep += m;
        }
    }
    if total > 0.0 {
        deep / total
    } else {
        0.0
    }
}
