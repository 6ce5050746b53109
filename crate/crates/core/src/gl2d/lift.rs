use std::sync::Arc;

use num_complex::Complex64;

use super::field::Field2D;
use super::mesh::Mesh2D;
use super::potential::{FrozenField, VectorField};
use crate::boundary::BoundaryGeometry;
use crate::error::{Error, Result};
use crate::numerics::smoothstep5;
use crate::trial::TrialState;

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

fn gl4<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let (h, m) = (0.5 * (b - a), 0.5 * (a + b));
    GL4.iter().map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

/// Cut-off in the normal variable: 1 on `[0, t_eps]`, quintic decay to 0 at `t_end`.
pub fn cutoff(t: f64, t_eps: f64, t_end: f64) -> f64 {
    if t <= t_eps {
        1.0
    } else if t >= t_end {
        0.0
    } else {
        1.0 - smoothstep5((t - t_eps) / (t_end - t_eps))
    }
}

/// Carries the trial state to the mesh in the gauge of `potential`:
/// `Psi = g chi exp(-i (S/eps + eps^-2 int_0^s F . gamma' + eps^-2 int_0^tau F . nu))`,
/// with the cut-off `chi` reaching zero at `min(2 t_eps, collar/eps)`.
pub fn lift_trial(
    trial: &TrialState,
    geom: &BoundaryGeometry,
    mesh: Arc<Mesh2D>,
    potential: &FrozenField,
) -> Result<Field2D> {
    let params = *trial.params();
    let eps = params.eps;
    let eps2 = eps * eps;
    let t_eps = params.t_eps;
    let layer = t_eps * eps;
    let collar = *mesh.taus.last().unwrap();
    if collar < layer * (1.0 - 1e-12) {
        return Err(Error::CollarCoverage { collar, needed: layer });
    }
    let t_end = (2.0 * t_eps).min(collar / eps);
    let n_s = mesh.n_s;
    let n_r = mesh.taus.len();
    let h_s = mesh.h_s;

    // Tangential gauge phase along the boundary.
    let mut tang = vec![0.0; n_s];
    let mut acc = 0.0;
    for j in 1..n_s {
        let (a, b) = ((j - 1) as f64 * h_s, j as f64 * h_s);
        acc += gl4(a, b, |s| {
            let (p, t, _) = geom.frame(s);
            let f = potential.value(p);
            f[0] * t[0] + f[1] * t[1]
        });
        tang[j] = acc / eps2;
    }

    let mut psi = vec![Complex64::new(0.0, 0.0); mesh.n_nodes()];
    for j in 0..n_s {
        let s = j as f64 * h_s;
        let (p, t, _) = geom.frame(s);
        let nu = [-t[1], t[0]];
        let base = trial.phase(s) / eps + tang[j];
        let mut normal = 0.0;
        for r in 0..n_r {
            let tau = mesh.taus[r];
            if r > 0 {
                let t0 = mesh.taus[r - 1];
                normal += gl4(t0, tau, |eta| {
                    let f = potential.value([p[0] + eta * nu[0], p[1] + eta * nu[1]]);
                    f[0] * nu[0] + f[1] * nu[1]
                }) / eps2;
            }
            let tt = tau / eps;
            if tt >= t_end || mesh.is_dirichlet(r * n_s + j) {
                break;
            }
            let rho = trial.density(s, tt) * cutoff(tt, t_eps, t_end);
            psi[r * n_s + j] = Complex64::from_polar(rho, -(base + normal));
        }
    }
    Field2D::new(mesh, &params, psi, potential)
}
