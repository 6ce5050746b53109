use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest layer width used by the default `c0` rule.
pub const MIN_LAYER_WIDTH: f64 = 8.0;

/// Physical and numerical parameters shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub b: f64,
    pub eps: f64,
    pub c0: f64,
    /// `c0 * |log eps|`, the right end of the normal interval.
    pub t_eps: f64,
    /// Fractional gauge offset; lies in `[0, 2pi/|boundary|)`, which is `[0, 1)`
    /// for boundaries at least as long as the unit circle.
    pub delta_eps: f64,
    pub d_eps: f64,
}

impl ProblemParams {
    pub fn new(b: f64, eps: f64, c0: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.2) {
            return Err(Error::InvalidParameter(format!("eps = {eps} not in (0, 0.2]")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("b = {b} must be positive")));
        }
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::InvalidParameter(format!("c0 = {c0} must be positive")));
        }
        let log_eps = eps.ln().abs();
        Ok(Self {
            b,
            eps,
            c0,
            t_eps: c0 * log_eps,
            delta_eps: 0.0,
            d_eps: log_eps.powi(-5),
        })
    }

    /// Default layer width: the smallest `t_eps >= 8` with `eps*|k|*t_eps <= 1/2`
    /// for every curvature up to `k_max`. When the two requirements clash the
    /// metric bound wins and a warning is logged.
    pub fn with_default_width(b: f64, eps: f64, k_max: f64) -> Result<Self> {
        let t = default_layer_width(eps, k_max);
        let log_eps = eps.ln().abs();
        Self::new(b, eps, t / log_eps)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta_eps = {delta} must be >= 0")));
        }
        self.delta_eps = delta;
        Ok(self)
    }

    pub fn with_d_eps(mut self, d: f64) -> Result<Self> {
        let max = self.max_d_eps();
        if !(d >= 0.0 && d <= max) {
            return Err(Error::MarginOutOfRange { d_eps: d, max });
        }
        self.d_eps = d;
        Ok(self)
    }

    pub fn log_eps(&self) -> f64 {
        self.eps.ln().abs()
    }

    pub fn max_d_eps(&self) -> f64 {
        self.log_eps().powi(-4)
    }
}

pub fn default_layer_width(eps: f64, k_max: f64) -> f64 {
    // alpha(k) stays near -0.77, so 2|alpha| + 6 never beats the floor of 8.
    let mut t = MIN_LAYER_WIDTH;
    let k = k_max.abs();
    if k > 0.0 {
        // Slightly inside the bound so cell-mean curvatures cannot cross it.
        let cap = 0.5 * (1.0 - 1e-6) / (eps * k);
        if cap < t {
            log::warn!(
                "layer width capped at {cap:.3} (< {MIN_LAYER_WIDTH}) to keep eps*k*t <= 1/2 for k = {k}"
            );
            t = cap;
        }
    }
    t
}

/// Uniform grid on `[0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub t0: f64,
    pub t1: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid1D {
    pub fn new(t1: f64, n: usize) -> Result<Self> {
        if n < 64 {
            return Err(Error::InvalidParameter(format!("grid needs at least 64 nodes, got {n}")));
        }
        if !(t1 > 0.0 && t1.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid endpoint {t1} must be positive")));
        }
        Ok(Self {
            t0: 0.0,
            t1,
            n,
            h: t1 / (n - 1) as f64,
        })
    }

    /// Grid over the layer `[0, t_eps]`.
    pub fn layer(params: &ProblemParams, n: usize) -> Result<Self> {
        Self::new(params.t_eps, n)
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.t1
        } else {
            i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

pub const DEFAULT_GRID_NODES: usize = 2048;
