//! Preconditioned nonlinear conjugate gradients (Polak-Ribiere+) on `psi` at
//! fixed vector potential. Along a search direction the discrete energy is an
//! exact quartic, so every line search is exact and every accepted step lowers
//! the energy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{energy_gradient, line_quartic, Field2D};
use crate::error::{Error, Result};
use crate::numerics::cubic_roots;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    /// Stop when the energy drops by less than this (relative) over `window` iterations.
    pub rel_decrease: f64,
    pub window: usize,
    /// Stop when `max_n eps^2 |grad_n| / (2 area_n)` falls below this.
    pub grad_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            rel_decrease: 1e-12,
            window: 100,
            grad_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimized {
    pub field: Field2D,
    pub energy: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub trace: Vec<f64>,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn quartic_value(q: &[f64; 5], x: f64) -> f64 {
    (((q[4] * x + q[3]) * x + q[2]) * x + q[1]) * x + q[0]
}

/// Global minimizer of the quartic (positive leading coefficient assumed).
fn quartic_argmin(q: &[f64; 5]) -> f64 {
    let roots = cubic_roots(4.0 * q[4], 3.0 * q[3], 2.0 * q[2], q[1]);
    let mut best = 0.0;
    let mut best_v = q[0];
    for r in roots {
        if r.is_finite() {
            let v = quartic_value(q, r);
            if v < best_v {
                best_v = v;
                best = r;
            }
        }
    }
    best
}

fn scaled_grad_norm(field: &Field2D, grad: &[Complex64]) -> f64 {
    let eps2 = field.params.eps * field.params.eps;
    let mesh = &field.mesh;
    grad.iter()
        .enumerate()
        .filter(|(i, _)| !mesh.is_dirichlet(*i))
        .map(|(i, g)| eps2 * g.norm() / (2.0 * mesh.area[i]))
        .fold(0.0, f64::max)
}

pub fn minimize(init: &Field2D, opts: &MinimizeOptions) -> Result<Minimized> {
    let mesh = &init.mesh;
    let n = mesh.n_nodes();
    let c = init.potential_coefficient();
    // Jacobi preconditioner of the Hessian at |psi| = 1.
    let mut precond = vec![0.0; n];
    for e in 0..mesh.n_edges() {
        let w = 2.0 * mesh.edge_w[e];
        precond[mesh.edge_a[e] as usize] += w;
        precond[mesh.edge_b[e] as usize] += w;
    }
    for i in 0..n {
        // A zero preconditioner entry keeps Dirichlet nodes out of every search direction.
        precond[i] = if mesh.is_dirichlet(i) { 0.0 } else { 1.0 / (precond[i] + 8.0 * c * mesh.area[i]) };
    }

    let mut psi = init.psi.clone();
    for (i, z) in psi.iter_mut().enumerate() {
        if mesh.is_dirichlet(i) {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    let mut grad = vec![Complex64::new(0.0, 0.0); n];
    let mut energy = energy_gradient(init, &psi, &mut grad);
    let mut z: Vec<Complex64> = grad.iter().zip(&precond).map(|(g, p)| g * p).collect();
    let mut dir: Vec<Complex64> = z.iter().map(|v| -v).collect();
    let mut gz = dot(&grad, &z);
    let mut trace = vec![energy];
    let mut gnorm = scaled_grad_norm(init, &grad);
    let mut restarted = false;

    for it in 0..opts.max_iter {
        if gnorm < opts.grad_tol {
            return Ok(done(init, psi, energy, it, gnorm, trace));
        }
        if it >= opts.window {
            let old = trace[trace.len() - 1 - opts.window];
            if old - energy < opts.rel_decrease * energy.abs() {
                return Ok(done(init, psi, energy, it, gnorm, trace));
            }
        }
        let q = line_quartic(init, &psi, &dir);
        if q[4] <= 0.0 {
            return Ok(done(init, psi, energy, it, gnorm, trace));
        }
        let lambda = quartic_argmin(&q);
        let trial: Vec<Complex64> = psi.iter().zip(&dir).map(|(x, d)| x + d * lambda).collect();
        let mut g_new = vec![Complex64::new(0.0, 0.0); n];
        let e_new = energy_gradient(init, &trial, &mut g_new);
        if !(e_new <= energy) {
            // Only rounding can get here: restart along the preconditioned
            // gradient once, and stop if that cannot descend either.
            if restarted || lambda == 0.0 {
                return Ok(done(init, psi, energy, it, gnorm, trace));
            }
            restarted = true;
            dir = z.iter().map(|v| -v).collect();
            continue;
        }
        restarted = false;
        psi = trial;
        energy = e_new;
        trace.push(energy);
        let z_new: Vec<Complex64> = g_new.iter().zip(&precond).map(|(g, p)| g * p).collect();
        let gz_new = dot(&g_new, &z_new);
        let gz_mixed = dot(&g_new, &z);
        let beta = ((gz_new - gz_mixed) / gz).max(0.0);
        for i in 0..n {
            dir[i] = dir[i] * beta - z_new[i];
        }
        if dot(&g_new, &dir) >= 0.0 {
            dir = z_new.iter().map(|v| -v).collect();
        }
        grad = g_new;
        z = z_new;
        gz = gz_new;
        gnorm = scaled_grad_norm(init, &grad);
    }
    Err(Error::NonConvergence {
        what: "2D minimization",
        iterations: opts.max_iter,
        residual: gnorm,
        trace,
    })
}

fn done(init: &Field2D, psi: Vec<Complex64>, energy: f64, iterations: usize, grad_norm: f64, trace: Vec<f64>) -> Minimized {
    Minimized {
        field: init.with_psi(psi),
        energy,
        iterations,
        grad_norm,
        trace,
    }
}
