//! Contract checks shared by the subcommands and the acceptance suite.

use serde::{Deserialize, Serialize};

use surfgl_core::costfn::{correction_function, cost_function, potential_function};
use surfgl_core::params::{Grid1D, ProblemParams};
use surfgl_core::profile1d::{optimal_phase, OptimalPair};
use surfgl_core::Result;

use crate::config::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileChecks {
    pub el_residual: f64,
    /// `|E + (1/2b) int (1 - eps k t) f^4| / |E|`.
    pub energy_identity: f64,
    /// `|stationarity integral| / ||f||^2`.
    pub stationarity: f64,
    pub sup: f64,
    /// Largest increase `f_{i+1} - f_i` past `t = -alpha + 1/sqrt(b)`.
    pub monotone_violation: f64,
    pub min_value: f64,
}

impl ProfileChecks {
    pub fn of(pair: &OptimalPair) -> Self {
        let p = &pair.profile;
        let e = pair.energy;
        let identity = e + p.quartic_moment() / (2.0 * p.params.b);
        let t_mono = -p.alpha + 1.0 / p.params.b.sqrt();
        let mut violation: f64 = 0.0;
        for i in 0..p.grid.n - 1 {
            if p.grid.node(i) >= t_mono {
                violation = violation.max(p.values[i + 1] - p.values[i]);
            }
        }
        Self {
            el_residual: p.residual_norm(),
            energy_identity: identity.abs() / e.abs().max(f64::MIN_POSITIVE),
            stationarity: pair.stationarity_residual.abs() / p.l2_norm_sq(),
            sup: p.sup(),
            monotone_violation: violation,
            min_value: p.values.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    /// Named pass/fail flags.
    pub fn flags(&self, tol: &Tolerances) -> Vec<(&'static str, bool)> {
        vec![
            ("el_residual", self.el_residual <= tol.el_residual),
            ("energy_identity", self.energy_identity <= tol.energy_identity),
            ("stationarity", self.stationarity <= tol.stationarity),
            ("sup", self.sup <= 1.0 + tol.sup_slack),
            ("monotone", self.monotone_violation <= 0.0),
            ("positive", self.min_value > 0.0),
        ]
    }
}

/// Minimum of the cost function on `[0, t_bar]` and `t_bar` itself.
pub fn min_cost(pair: &OptimalPair, d_eps: f64) -> Result<(f64, f64)> {
    let cp = cost_function(&potential_function(pair), d_eps)?;
    Ok((cp.min_k.expect("cost evaluated"), cp.t_bar))
}

/// Normalized curvature-continuity ratios for one `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    pub eps: f64,
    pub energy: f64,
    pub phase: f64,
    pub density: f64,
    pub logderiv: f64,
    pub correction: f64,
}

impl ContinuityRow {
    pub fn values(&self) -> [f64; 5] {
        [self.energy, self.phase, self.density, self.logderiv, self.correction]
    }

    pub const NAMES: [&'static str; 5] = ["energy", "phase", "density", "logderiv", "correction"];
}

pub fn continuity_row(b: f64, k: f64, k_prime: f64, eps: f64, grid_nodes: usize) -> Result<ContinuityRow> {
    let params = ProblemParams::with_default_width(b, eps, k.abs().max(k_prime.abs()))?;
    let grid = Grid1D::layer(&params, grid_nodes)?;
    let pa = optimal_phase(k, &params, &grid)?;
    let pb = optimal_phase(k_prime, &params, &grid)?;
    let dk = eps * (k - k_prime).abs();
    let diag = correction_function(&pa, &pb)?;
    let df = pa
        .profile
        .values
        .iter()
        .zip(&pb.profile.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(ContinuityRow {
        eps,
        energy: (pa.energy - pb.energy).abs() / dk,
        phase: (pa.alpha_star - pb.alpha_star).abs() / dk.sqrt(),
        density: df / dk.sqrt(),
        logderiv: diag.logderiv_gap / dk.sqrt(),
        correction: diag.sup_ratio / dk.sqrt(),
    })
}

/// Largest factor by which any ratio strays from its value in the first row.
pub fn continuity_spread(rows: &[ContinuityRow]) -> [f64; 5] {
    let mut spread = [1.0; 5];
    if let Some(first) = rows.first() {
        let f = first.values();
        for r in rows {
            for (i, v) in r.values().iter().enumerate() {
                let q = v / f[i];
                spread[i] = f64::max(spread[i], q.max(1.0 / q));
            }
        }
    }
    spread
}

/// Strictly decreasing sequence check.
pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}
