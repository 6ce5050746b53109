//! de Gennes constant: `Theta0 = min_alpha mu(alpha)`, with `mu(alpha)` the lowest
//! Neumann eigenvalue of `-d^2/dt^2 + (t + alpha)^2` on the half-line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{brent_minimize, solve_tridiagonal};
use crate::params::Grid1D;
use crate::profile1d::Weights;

/// Truncation point of the half-line; eigenfunctions are below 1e-20 there.
pub const TRUNCATION: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta0 {
    pub theta0: f64,
    pub alpha: f64,
    pub resolution: usize,
    pub truncation: f64,
}

/// Lowest Neumann eigenvalue on `[0, t_max]` by inverse iteration on the
/// same ghost-node discretization as the 1D profile solver.
pub fn half_line_eigenvalue(alpha: f64, resolution: usize, t_max: f64) -> Result<f64> {
    if resolution < 512 {
        return Err(Error::InvalidParameter(format!("resolution {resolution} < 512")));
    }
    if t_max < 10.0 {
        return Err(Error::InvalidParameter(format!("truncation {t_max} < 10")));
    }
    let grid = Grid1D::new(t_max, resolution)?;
    let w = Weights::new(&grid, 0.0, alpha, 0.1)?;
    let n = grid.n;
    let off: Vec<f64> = w.edge.iter().map(|e| -e / w.h).collect();
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let mut d = 0.0;
            if i > 0 {
                d += w.edge[i - 1];
            }
            if i + 1 < n {
                d += w.edge[i];
            }
            d / w.h + w.node[i] * w.v[i]
        })
        .collect();
    let apply = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let mut y = diag[i] * x[i];
                if i > 0 {
                    y += off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += off[i] * x[i + 1];
                }
                y
            })
            .collect()
    };
    let m_dot = |a: &[f64], b: &[f64]| -> f64 { (0..n).map(|i| w.node[i] * a[i] * b[i]).sum() };

    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let t = grid.node(i) + alpha;
            (-0.5 * t * t).exp()
        })
        .collect();
    let mut mu = f64::INFINITY;
    for it in 0..500 {
        let rhs: Vec<f64> = (0..n).map(|i| w.node[i] * x[i]).collect();
        let mut y = solve_tridiagonal(&off, &diag, &off, &rhs)?;
        let norm = m_dot(&y, &y).sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let ay = apply(&y);
        let rq = ay.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        x = y;
        if (rq - mu).abs() <= 1e-12 * rq.abs() && it > 2 {
            return Ok(rq);
        }
        mu = rq;
    }
    Err(Error::NonConvergence {
        what: "inverse iteration",
        iterations: 500,
        residual: mu,
        trace: Vec::new(),
    })
}

pub fn theta0(resolution: usize, alpha_range: (f64, f64)) -> Result<Theta0> {
    let (lo, hi) = alpha_range;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty alpha bracket [{lo}, {hi}]")));
    }
    let min = brent_minimize(
        |a| half_line_eigenvalue(a, resolution, TRUNCATION),
        lo,
        hi,
        1e-9,
        200,
    )?;
    Ok(Theta0 {
        theta0: min.fx,
        alpha: min.x,
        resolution,
        truncation: TRUNCATION,
    })
}
