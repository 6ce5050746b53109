//! Curvature-dependent 1D effective functional
//! `E[f] = int_0^t_eps (1 - eps k t) { f'^2 + V f^2 - (2f^2 - f^4)/(2b) } dt`
//! with `V = (t + alpha - eps k t^2/2)^2 / (1 - eps k t)^2`.
//!
//! The discretization is variational: the kinetic term lives on edge midpoints
//! with weight `1 - eps k t_{i+1/2}` and the remaining terms use node weights
//! whose end values are half the adjacent edge weight. With that choice the
//! discrete Euler-Lagrange equation is exactly the ghost-node central-difference
//! form of `-f'' + eps k/(1 - eps k t) f' + V f = (1 - f^2) f / b` with Neumann
//! ends, and the energy identity and Feynman-Hellmann relation hold exactly at
//! the discrete level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{brent_minimize, brent_root, solve_tridiagonal};
use crate::params::{Grid1D, ProblemParams};

/// Lower end of the de Gennes window, `1/Theta0`.
pub const THETA0_REFERENCE: f64 = 0.590_106_125;

pub const ALPHA_BRACKET: (f64, f64) = (-4.0, 0.0);

/// Gradient-flow step budget.
pub const MAX_FLOW_STEPS: usize = 100_000;

const RESIDUAL_TARGET: f64 = 1e-11;
const RESIDUAL_ACCEPT: f64 = 1e-9;
const NEWTON_SWITCH: f64 = 1e-4;
const NORMAL_STATE_SUP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub alpha: f64,
    pub k: f64,
    pub params: ProblemParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalPair {
    pub alpha_star: f64,
    pub profile: Profile1D,
    pub energy: f64,
    pub stationarity_residual: f64,
}

pub fn potential_v(t: f64, k: f64, alpha: f64, eps: f64) -> Result<f64> {
    let metric = 1.0 - eps * k * t;
    if metric <= 0.0 {
        return Err(Error::DegenerateMetric { t, k, metric });
    }
    let beta = t + alpha - 0.5 * eps * k * t * t;
    Ok(beta * beta / (metric * metric))
}

/// Discrete weights of the functional for one `(k, alpha)`.
#[derive(Debug, Clone)]
pub(crate) struct Weights {
    pub h: f64,
    /// `1 - eps k t` at edge midpoints, length n - 1.
    pub edge: Vec<f64>,
    /// Node quadrature weights including the metric factor.
    pub node: Vec<f64>,
    /// `1 - eps k t` at nodes.
    pub metric: Vec<f64>,
    pub v: Vec<f64>,
    /// `(t + alpha - eps k t^2/2) / (1 - eps k t)^2` at nodes.
    pub dv: Vec<f64>,
}

impl Weights {
    pub fn new(grid: &Grid1D, k: f64, alpha: f64, eps: f64) -> Result<Self> {
        Self::with_min_metric(grid, k, alpha, eps, 0.5)
    }

    pub fn with_min_metric(grid: &Grid1D, k: f64, alpha: f64, eps: f64, min_metric: f64) -> Result<Self> {
        let n = grid.n;
        let h = grid.h;
        let mut metric = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut dv = Vec::with_capacity(n);
        for i in 0..n {
            let t = grid.node(i);
            let m = 1.0 - eps * k * t;
            if m < min_metric - 1e-9 {
                return Err(Error::DegenerateMetric { t, k, metric: m });
            }
            let beta = t + alpha - 0.5 * eps * k * t * t;
            metric.push(m);
            v.push(beta * beta / (m * m));
            dv.push(beta / (m * m));
        }
        let edge: Vec<f64> = (0..n - 1)
            .map(|i| 1.0 - eps * k * (grid.node(i) + 0.5 * h))
            .collect();
        let mut node: Vec<f64> = metric.iter().map(|m| h * m).collect();
        node[0] = 0.5 * h * edge[0];
        node[n - 1] = 0.5 * h * edge[n - 2];
        Ok(Self {
            h,
            edge,
            node,
            metric,
            v,
            dv,
        })
    }

    pub fn len(&self) -> usize {
        self.node.len()
    }

    pub fn energy(&self, f: &[f64], b: f64) -> f64 {
        let mut kinetic = 0.0;
        for (i, w) in self.edge.iter().enumerate() {
            let d = f[i + 1] - f[i];
            kinetic += w * d * d;
        }
        let mut pot = 0.0;
        for i in 0..f.len() {
            let f2 = f[i] * f[i];
            pot += self.node[i] * (self.v[i] * f2 - (2.0 * f2 - f2 * f2) / (2.0 * b));
        }
        kinetic / self.h + pot
    }

    /// `(K f)_i`, the stiffness part of the Euler-Lagrange operator (unscaled).
    fn stiffness_apply(&self, f: &[f64], i: usize) -> f64 {
        let n = f.len();
        let mut s = 0.0;
        if i > 0 {
            s += self.edge[i - 1] * (f[i] - f[i - 1]);
        }
        if i + 1 < n {
            s -= self.edge[i] * (f[i + 1] - f[i]);
        }
        s / self.h
    }

    /// Nodal Euler-Lagrange residual (half the energy gradient over the node weight).
    pub fn residual(&self, f: &[f64], b: f64) -> Vec<f64> {
        (0..f.len())
            .map(|i| {
                self.stiffness_apply(f, i) / self.node[i] + (self.v[i] - (1.0 - f[i] * f[i]) / b) * f[i]
            })
            .collect()
    }

    /// Half the derivative of the discrete energy in `alpha` at a critical point.
    pub fn stationarity(&self, f: &[f64]) -> f64 {
        (0..f.len())
            .map(|i| self.node[i] * self.dv[i] * f[i] * f[i])
            .sum()
    }

    fn stiffness_bands(&self, shift: impl Fn(usize) -> f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.len();
        let off: Vec<f64> = self.edge.iter().map(|w| -w / self.h).collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let mut d = 0.0;
                if i > 0 {
                    d += self.edge[i - 1];
                }
                if i + 1 < n {
                    d += self.edge[i];
                }
                d / self.h + self.node[i] * shift(i)
            })
            .collect();
        (off.clone(), diag, off)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl Profile1D {
    pub(crate) fn weights(&self) -> Result<Weights> {
        Weights::new(&self.grid, self.k, self.alpha, self.params.eps)
    }

    /// Max-norm of the discrete Euler-Lagrange residual.
    pub fn residual_norm(&self) -> f64 {
        match self.weights() {
            Ok(w) => max_abs(&w.residual(&self.values, self.params.b)),
            Err(_) => f64::INFINITY,
        }
    }

    /// `int (t + alpha - eps k t^2/2)/(1 - eps k t) f^2 dt`.
    pub fn stationarity_integral(&self) -> f64 {
        self.weights()
            .map(|w| w.stationarity(&self.values))
            .unwrap_or(f64::NAN)
    }

    /// Trapezoid `int f^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        let v = &self.values;
        let n = v.len();
        let inner: f64 = v[1..n - 1].iter().map(|x| x * x).sum();
        self.grid.h * (inner + 0.5 * (v[0] * v[0] + v[n - 1] * v[n - 1]))
    }

    /// `int (1 - eps k t) f^4` with the solver's node weights, so that
    /// `E = -(1/2b) int (1 - eps k t) f^4` holds up to the Euler-Lagrange residual.
    pub fn quartic_moment(&self) -> f64 {
        match self.weights() {
            Ok(w) => w.node.iter().zip(&self.values).map(|(m, f)| m * f.powi(4)).sum(),
            Err(_) => f64::NAN,
        }
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(*x))
    }

    pub fn is_normal_state(&self) -> bool {
        self.sup() == 0.0
    }

    /// Linear interpolation of `f` at `t`; zero beyond the layer.
    pub fn eval(&self, t: f64) -> f64 {
        if t > self.grid.t1 {
            return 0.0;
        }
        crate::numerics::interp_uniform(&self.values, self.grid.h, t)
    }
}

pub fn energy_1d(f: &Profile1D) -> f64 {
    // Invariants of Profile1D guarantee the metric bound.
    let w = Weights::with_min_metric(&f.grid, f.k, f.alpha, f.params.eps, 0.0)
        .expect("profile violates the metric invariant");
    w.energy(&f.values, f.params.b)
}

pub fn initial_guess(grid: &Grid1D) -> Vec<f64> {
    (0..grid.n)
        .map(|i| {
            let t = grid.node(i);
            (-0.5 * t * t).exp()
        })
        .collect()
}

pub fn solve_profile(k: f64, alpha: f64, params: &ProblemParams, grid: &Grid1D) -> Result<Profile1D> {
    solve_profile_from(k, alpha, params, grid, &initial_guess(grid))
}

/// Minimizes the 1D functional at fixed `(k, alpha)` from `init`: convex-splitting
/// gradient flow (stiff part implicit, nonlinearity explicit, f <- |f| after
/// every step) followed by a Newton polish on the tridiagonal Jacobian.
pub fn solve_profile_from(
    k: f64,
    alpha: f64,
    params: &ProblemParams,
    grid: &Grid1D,
    init: &[f64],
) -> Result<Profile1D> {
    if init.len() != grid.n {
        return Err(Error::InvalidParameter(format!(
            "initial profile has {} samples, grid has {}",
            init.len(),
            grid.n
        )));
    }
    let w = Weights::new(grid, k, alpha, params.eps)?;
    let b = params.b;
    let n = grid.n;
    let mut f: Vec<f64> = init.iter().map(|x| x.abs()).collect();
    let e_init = w.energy(&f, b);

    // Convex splitting: E = E_c - E_e with E_e convex whenever sigma >= 2/b and f <= 1.
    let sigma = 2.0 / b;
    let mut inv_tau = 1e-3;
    let mut energy = e_init;
    let mut res = max_abs(&w.residual(&f, b));
    let mut steps = 0;
    let mut trace = Vec::new();

    while res > NEWTON_SWITCH {
        if steps >= MAX_FLOW_STEPS {
            return Err(Error::NonConvergence {
                what: "1D gradient flow",
                iterations: steps,
                residual: res,
                trace,
            });
        }
        let (lo, diag, up) = w.stiffness_bands(|i| inv_tau + w.v[i] + sigma);
        let rhs: Vec<f64> = (0..n)
            .map(|i| w.node[i] * (inv_tau + sigma + (1.0 - f[i] * f[i]) / b) * f[i])
            .collect();
        let mut next = solve_tridiagonal(&lo, &diag, &up, &rhs)?;
        next.iter_mut().for_each(|x| *x = x.abs());
        let e_next = w.energy(&next, b);
        steps += 1;
        if e_next > energy + 1e-14 * energy.abs().max(1e-300) {
            // Only possible when f left [0, 1]; take smaller steps.
            inv_tau *= 4.0;
            if inv_tau > 1e12 {
                return Err(Error::NonConvergence {
                    what: "1D gradient flow",
                    iterations: steps,
                    residual: res,
                    trace,
                });
            }
            continue;
        }
        f = next;
        energy = e_next;
        res = max_abs(&w.residual(&f, b));
        if steps % 64 == 0 {
            trace.push(res);
        }
        if f.iter().all(|x| *x < NORMAL_STATE_SUP * 1e-3) {
            break;
        }
    }

    // Newton polish. The Jacobian is SPD near the positive minimizer (and at 0
    // in the normal phase), so the Thomas algorithm is stable here.
    let mut newton_steps = 0;
    let mut extra = 0;
    loop {
        if res <= RESIDUAL_TARGET {
            // One extra step settles the exponentially small tail relative to itself.
            extra += 1;
            if extra > 2 {
                break;
            }
        }
        if newton_steps >= 60 {
            if res <= RESIDUAL_ACCEPT {
                break;
            }
            return Err(Error::NonConvergence {
                what: "1D Newton polish",
                iterations: steps + newton_steps,
                residual: res,
                trace,
            });
        }
        newton_steps += 1;
        let (lo, diag, up) = w.stiffness_bands(|i| w.v[i] - (1.0 - 3.0 * f[i] * f[i]) / b);
        let rhs: Vec<f64> = w
            .residual(&f, b)
            .iter()
            .zip(&w.node)
            .map(|(r, m)| -r * m)
            .collect();
        let delta = solve_tridiagonal(&lo, &diag, &up, &rhs)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = f
                .iter()
                .zip(&delta)
                .map(|(x, d)| (x + lambda * d).abs())
                .collect();
            let r = max_abs(&w.residual(&trial, b));
            if r < res || (r <= RESIDUAL_TARGET && extra > 0) {
                f = trial;
                res = r;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            if res <= RESIDUAL_ACCEPT {
                break;
            }
            return Err(Error::NonConvergence {
                what: "1D Newton polish",
                iterations: steps + newton_steps,
                residual: res,
                trace,
            });
        }
    }

    if f.iter().fold(0.0f64, |m, x| m.max(*x)) < NORMAL_STATE_SUP {
        log::warn!("profile at k = {k}, alpha = {alpha}, b = {b} collapsed to the normal state");
        f.iter_mut().for_each(|x| *x = 0.0);
    }
    let out = Profile1D {
        grid: *grid,
        values: f,
        alpha,
        k,
        params: *params,
    };
    debug_assert!(w.energy(&out.values, b) <= e_init + 1e-12 * e_init.abs().max(1e-12));
    Ok(out)
}

fn warn_outside_window(b: f64) {
    if !(b > 1.0 && b < 1.0 / THETA0_REFERENCE) {
        log::warn!("b = {b} outside the surface-superconductivity window (1, {:.4})", 1.0 / THETA0_REFERENCE);
    }
}

fn finish_pair(profile: Profile1D) -> OptimalPair {
    let energy = energy_1d(&profile);
    OptimalPair {
        alpha_star: profile.alpha,
        stationarity_residual: profile.stationarity_integral(),
        energy,
        profile,
    }
}

/// Polishes the phase on the Feynman-Hellmann derivative around `alpha0`.
/// Returns `None` when no sign change is found nearby.
fn polish_phase(
    k: f64,
    params: &ProblemParams,
    grid: &Grid1D,
    alpha0: f64,
    start: &[f64],
    half_width: f64,
) -> Result<Option<Profile1D>> {
    let mut warm = start.to_vec();
    let mut phi = |alpha: f64| -> Result<f64> {
        let p = solve_profile_from(k, alpha, params, grid, &warm)?;
        if !p.is_normal_state() {
            warm.clone_from(&p.values);
        }
        Ok(p.stationarity_integral())
    };
    let (lo_lim, hi_lim) = ALPHA_BRACKET;
    let mut dw = half_width;
    for _ in 0..6 {
        let lo = (alpha0 - dw).max(lo_lim);
        let hi = (alpha0 + dw).min(hi_lim);
        let (plo, phi_hi) = (phi(lo)?, phi(hi)?);
        if plo < 0.0 && phi_hi > 0.0 {
            let root = brent_root(&mut phi, lo, hi, 1e-13, 200)?;
            let p = solve_profile_from(k, root, params, grid, start)?;
            return Ok(Some(p));
        }
        if plo == 0.0 && phi_hi == 0.0 {
            return Ok(None);
        }
        dw *= 4.0;
    }
    Ok(None)
}

/// Minimizes `alpha -> min_f E_{k,alpha}` on `[-4, 0]` with Brent's method,
/// then polishes the stationarity condition to root-finding accuracy.
pub fn optimal_phase(k: f64, params: &ProblemParams, grid: &Grid1D) -> Result<OptimalPair> {
    warn_outside_window(params.b);
    let (lo, hi) = ALPHA_BRACKET;
    let mut warm = initial_guess(grid);
    let min = brent_minimize(
        |alpha| {
            let p = solve_profile_from(k, alpha, params, grid, &warm)?;
            if !p.is_normal_state() {
                warm.clone_from(&p.values);
            }
            Ok(energy_1d(&p))
        },
        lo,
        hi,
        1e-7,
        200,
    )?;
    let p = solve_profile_from(k, min.x, params, grid, &warm)?;
    if p.is_normal_state() {
        return Ok(finish_pair(p));
    }
    if min.x - lo < 1e-3 || hi - min.x < 1e-3 {
        return Err(Error::BracketFailure { lo, hi, best: min.x });
    }
    let polished = polish_phase(k, params, grid, min.x, &p.values, 1e-3)?;
    Ok(finish_pair(polished.unwrap_or(p)))
}

/// Like [`optimal_phase`] but starts from a neighbouring optimal pair (same grid
/// and parameters, nearby curvature), falling back to the full search.
pub fn optimal_phase_near(
    k: f64,
    params: &ProblemParams,
    grid: &Grid1D,
    guess: &OptimalPair,
) -> Result<OptimalPair> {
    if guess.profile.grid != *grid || guess.profile.is_normal_state() {
        return optimal_phase(k, params, grid);
    }
    let start = solve_profile_from(k, guess.alpha_star, params, grid, &guess.profile.values)?;
    if start.is_normal_state() {
        return optimal_phase(k, params, grid);
    }
    match polish_phase(k, params, grid, guess.alpha_star, &start.values, 0.02)? {
        Some(p) => Ok(finish_pair(p)),
        None => optimal_phase(k, params, grid),
    }
}
