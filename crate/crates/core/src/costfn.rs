//! Potential function `F_k`, cost function `K_k = (1 - d) f_k^2 + F_k`, the
//! correction function `I_{k,k'} = F_k - F_{k'} f_k^2 / f_{k'}^2` and the gap
//! between logarithmic derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cumulative_trapezoid, derivative};
use crate::profile1d::{OptimalPair, Profile1D};

/// Nodes where the denominator profile drops below this are skipped.
pub const DIVISION_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostProfile {
    pub base: Profile1D,
    #[serde(rename = "F")]
    pub f_pot: Vec<f64>,
    #[serde(rename = "K")]
    pub k_cost: Option<Vec<f64>>,
    pub t_bar: f64,
    /// Index of `t_bar` on the grid.
    pub t_bar_index: usize,
    pub d_eps: Option<f64>,
    /// Minimum of `K` over `[0, t_bar]` on nodes and midpoints.
    pub min_k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionDiagnostics {
    pub k: f64,
    pub k_prime: f64,
    #[serde(rename = "I")]
    pub i_corr: Vec<f64>,
    pub sup_ratio: f64,
    pub sup_deriv_ratio: f64,
    pub logderiv_gap: f64,
    pub excluded: usize,
}

/// Largest node index with `f(t) >= |log eps|^3 f(t_eps)`.
fn positivity_end(p: &Profile1D) -> usize {
    let v = &p.values;
    let threshold = p.params.log_eps().powi(3) * v[v.len() - 1];
    v.iter().rposition(|x| *x >= threshold).unwrap_or(0)
}

/// `2 f^2 (t + alpha - eps k t^2/2)/(1 - eps k t)` at the nodes. The two end samples
/// carry the half-edge metric factor of the profile discretization.
fn potential_integrand(p: &Profile1D) -> Vec<f64> {
    let (eps, k, alpha) = (p.params.eps, p.k, p.alpha);
    let n = p.grid.n;
    let h = p.grid.h;
    let mut integrand: Vec<f64> = (0..n)
        .map(|i| {
            let t = p.grid.node(i);
            let m = 1.0 - eps * k * t;
            2.0 * p.values[i] * p.values[i] * (t + alpha - 0.5 * eps * k * t * t) / m
        })
        .collect();
    integrand[0] *= 1.0 - eps * k * 0.5 * h;
    let t_last = p.grid.node(n - 1);
    integrand[n - 1] *= (1.0 - eps * k * (t_last - 0.5 * h)) / (1.0 - eps * k * t_last);
    integrand
}

/// `F(t) = -int_t^{t_eps}`, i.e. `F` with its endpoint value set to the exact zero of
/// the optimal phase. Accumulated from the right so the tail keeps full relative
/// precision, which `I / f^2` needs where `f` is exponentially small.
fn tail_potential(p: &Profile1D) -> Vec<f64> {
    let mut g = potential_integrand(p);
    g.reverse();
    let mut f = cumulative_trapezoid(&g, p.grid.h);
    f.reverse();
    f.iter_mut().for_each(|v| *v = -*v);
    f
}

/// Cumulative trapezoid of the potential integrand; `F(t_eps)` is exactly twice the
/// solver's stationarity integral.
pub fn potential_function(pair: &OptimalPair) -> CostProfile {
    let p = &pair.profile;
    let f_pot = cumulative_trapezoid(&potential_integrand(p), p.grid.h);
    let idx = positivity_end(p);
    CostProfile {
        base: p.clone(),
        f_pot,
        k_cost: None,
        t_bar: p.grid.node(idx),
        t_bar_index: idx,
        d_eps: None,
        min_k: None,
    }
}

pub fn cost_function(cp: &CostProfile, d_eps: f64) -> Result<CostProfile> {
    let max = cp.base.params.max_d_eps();
    if !(d_eps >= 0.0 && d_eps <= max) {
        return Err(Error::MarginOutOfRange { d_eps, max });
    }
    let f = &cp.base.values;
    let kc: Vec<f64> = f
        .iter()
        .zip(&cp.f_pot)
        .map(|(fi, fp)| (1.0 - d_eps) * fi * fi + fp)
        .collect();

    // Midpoints: f linearly interpolated, F advanced by half a trapezoid panel.
    let p = &cp.base;
    let (eps, k, alpha, h) = (p.params.eps, p.k, p.alpha, p.grid.h);
    let g = |t: f64, fv: f64| 2.0 * fv * fv * (t + alpha - 0.5 * eps * k * t * t) / (1.0 - eps * k * t);
    let mut min_k = f64::INFINITY;
    for i in 0..=cp.t_bar_index {
        min_k = min_k.min(kc[i]);
        if i < cp.t_bar_index {
            let t = p.grid.node(i);
            let fm = 0.5 * (f[i] + f[i + 1]);
            let fpm = cp.f_pot[i] + 0.25 * h * (g(t, f[i]) + g(t + 0.5 * h, fm));
            min_k = min_k.min((1.0 - d_eps) * fm * fm + fpm);
        }
    }
    let mut out = cp.clone();
    out.k_cost = Some(kc);
    out.d_eps = Some(d_eps);
    out.min_k = Some(min_k);
    Ok(out)
}

fn log_derivative(values: &[f64], h: f64) -> Vec<f64> {
    derivative(values, h)
        .iter()
        .zip(values)
        .map(|(d, v)| d / v)
        .collect()
}

fn check_same_grid(pa: &OptimalPair, pb: &OptimalPair) -> Result<()> {
    if pa.profile.grid != pb.profile.grid {
        return Err(Error::InvalidParameter("optimal pairs live on different grids".into()));
    }
    Ok(())
}

pub fn correction_function(pa: &OptimalPair, pb: &OptimalPair) -> Result<CorrectionDiagnostics> {
    check_same_grid(pa, pb)?;
    let fpa = tail_potential(&pa.profile);
    let fpb = tail_potential(&pb.profile);
    let fa = &pa.profile.values;
    let fb = &pb.profile.values;
    let h = pa.profile.grid.h;
    let n = fa.len();

    let mut excluded = 0;
    let i_corr: Vec<f64> = (0..n)
        .map(|i| {
            if fb[i] < DIVISION_GUARD {
                excluded += 1;
                0.0
            } else {
                fpa[i] - fpb[i] * (fa[i] * fa[i]) / (fb[i] * fb[i])
            }
        })
        .collect();
    let di = derivative(&i_corr, h);
    let t_bar = positivity_end(&pa.profile).min(positivity_end(&pb.profile));

    let mut sup_ratio: f64 = 0.0;
    let mut sup_deriv_ratio: f64 = 0.0;
    for i in 0..n {
        if fb[i] < DIVISION_GUARD || fa[i] < DIVISION_GUARD {
            continue;
        }
        let fa2 = fa[i] * fa[i];
        sup_ratio = sup_ratio.max((i_corr[i] / fa2).abs());
        if i <= t_bar {
            sup_deriv_ratio = sup_deriv_ratio.max((di[i] / fa2).abs());
        }
    }
    Ok(CorrectionDiagnostics {
        k: pa.profile.k,
        k_prime: pb.profile.k,
        i_corr,
        sup_ratio,
        sup_deriv_ratio,
        logderiv_gap: log_derivative_gap(pa, pb)?,
        excluded,
    })
}

pub fn log_derivative_gap(pa: &OptimalPair, pb: &OptimalPair) -> Result<f64> {
    check_same_grid(pa, pb)?;
    let h = pa.profile.grid.h;
    let fa = &pa.profile.values;
    let fb = &pb.profile.values;
    let la = log_derivative(fa, h);
    let lb = log_derivative(fb, h);
    let mut gap: f64 = 0.0;
    for i in 0..fa.len() {
        if fa[i] < DIVISION_GUARD || fb[i] < DIVISION_GUARD {
            continue;
        }
        gap = gap.max((la[i] - lb[i]).abs());
    }
    Ok(gap)
}
