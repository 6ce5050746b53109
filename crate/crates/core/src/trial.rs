//! Boundary-layer functional on `[0, |boundary|] x [0, t_eps]`, the explicit trial
//! state built from per-cell optimal pairs, and the per-cell energy decoupling.
//!
//! Discretization: in `t` the same variational scheme as the 1D problem; in `s`
//! a gauge-covariant link form
//! `(|psi_{j+1}| - |psi_j|)^2 + |psi_j||psi_{j+1}| arg(conj(psi_j) psi_{j+1} e^{i theta})^2`
//! with `theta = a h_s / eps`. It is exact for plane waves, so the ansatz energy of
//! a piecewise-linear phase reduces to the 1D functionals with no `h_s` error.
//!
//! Phase convention: `psi = g exp(-i (S/eps + delta s))`, so the vector potential
//! term `eps delta` in `a` cancels against the explicit `delta s` and
//! periodicity means `S(L) + eps delta L` is a multiple of `2 pi eps`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::{
    decompose, reference_profile_with, BoundaryGeometry, CellDecomposition, ReferenceProfile,
};
use crate::error::{Error, Result};
use crate::numerics::{smoothstep5, smoothstep5_deriv, wrap_angle};
use crate::params::{Grid1D, ProblemParams, DEFAULT_GRID_NODES};
use crate::profile1d::Weights;

pub const DEFAULT_NODES_PER_CELL: usize = 16;

/// Tensor grid of the layer: `n_s` periodic nodes in `s`, the profile grid in `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerGrid {
    pub length: f64,
    pub n_s: usize,
    pub h_s: f64,
    pub nodes_per_cell: usize,
    /// Curvature at each `s` node.
    pub k: Vec<f64>,
    pub grid: Grid1D,
    pub params: ProblemParams,
}

impl LayerGrid {
    pub fn new(
        geom: &BoundaryGeometry,
        cells: &CellDecomposition,
        grid: &Grid1D,
        params: &ProblemParams,
        nodes_per_cell: usize,
    ) -> Self {
        let n_s = cells.n_cells * nodes_per_cell;
        let h_s = geom.length / n_s as f64;
        let k = (0..n_s).map(|j| geom.curvature(j as f64 * h_s)).collect();
        Self {
            length: geom.length,
            n_s,
            h_s,
            nodes_per_cell,
            k,
            grid: *grid,
            params: *params,
        }
    }

    /// A layer with prescribed curvature samples (e.g. a flat strip).
    pub fn from_curvature(length: f64, k: Vec<f64>, grid: &Grid1D, params: &ProblemParams, nodes_per_cell: usize) -> Self {
        let n_s = k.len();
        Self {
            length,
            n_s,
            h_s: length / n_s as f64,
            nodes_per_cell,
            k,
            grid: *grid,
            params: *params,
        }
    }

    pub fn s(&self, j: usize) -> f64 {
        j as f64 * self.h_s
    }

    #[inline]
    pub fn index(&self, j: usize, i: usize) -> usize {
        j * self.grid.n + i
    }

    fn column(&self, k: f64) -> Result<Weights> {
        Weights::with_min_metric(&self.grid, k, 0.0, self.params.eps, 0.5)
    }

    /// `a h_s / eps` at `(s_j, t_i)`.
    fn link_phase(&self, k: f64, t: f64) -> f64 {
        let eps = self.params.eps;
        (-t + 0.5 * eps * k * t * t + eps * self.params.delta_eps) * self.h_s / eps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryField {
    pub layer: LayerGrid,
    /// Row-major in `s`: entry `j * n_t + i` is `psi(s_j, t_i)`.
    pub values: Vec<Complex64>,
    pub periodic: bool,
}

impl BoundaryField {
    pub fn zeros(layer: &LayerGrid) -> Self {
        Self {
            layer: layer.clone(),
            values: vec![Complex64::new(0.0, 0.0); layer.n_s * layer.grid.n],
            periodic: true,
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(layer: &LayerGrid, f: F) -> Self {
        let mut values = Vec::with_capacity(layer.n_s * layer.grid.n);
        for j in 0..layer.n_s {
            let s = layer.s(j);
            for i in 0..layer.grid.n {
                values.push(f(s, layer.grid.node(i)));
            }
        }
        Self {
            layer: layer.clone(),
            values,
            periodic: true,
        }
    }
}

/// Link term `(|b| - |a|)^2 + |a||b| arg(conj(a) b e^{i theta})^2`.
#[inline]
fn link(a: Complex64, b: Complex64, theta: f64) -> f64 {
    let (ra, rb) = (a.norm(), b.norm());
    let d = rb - ra;
    if ra == 0.0 || rb == 0.0 {
        return d * d;
    }
    let z = a.conj() * b * Complex64::from_polar(1.0, theta);
    let ang = z.im.atan2(z.re);
    d * d + ra * rb * ang * ang
}

/// Energy of the columns `js` (the s-link of column j goes to j+1), with the
/// curvature of each column given by `k_of`.
fn functional_columns(
    psi: &BoundaryField,
    js: std::ops::Range<usize>,
    k_of: impl Fn(usize) -> f64,
) -> Result<f64> {
    let layer = &psi.layer;
    let (n_t, n_s) = (layer.grid.n, layer.n_s);
    let b = layer.params.b;
    let eps = layer.params.eps;
    let rs = (eps / layer.h_s).powi(2);
    let mut total = 0.0;
    for j in js {
        let k = k_of(j);
        let w = layer.column(k)?;
        let col = &psi.values[layer.index(j, 0)..layer.index(j, 0) + n_t];
        let next_j = (j + 1) % n_s;
        let next = &psi.values[layer.index(next_j, 0)..layer.index(next_j, 0) + n_t];
        let mut kin_t = 0.0;
        for i in 0..n_t - 1 {
            kin_t += w.edge[i] * (col[i + 1] - col[i]).norm_sqr();
        }
        let mut rest = 0.0;
        for i in 0..n_t {
            let t = layer.grid.node(i);
            let r2 = col[i].norm_sqr();
            let s_term = rs * link(col[i], next[i], layer.link_phase(k, t)) / (w.metric[i] * w.metric[i]);
            rest += w.node[i] * (s_term - (2.0 * r2 - r2 * r2) / (2.0 * b));
        }
        total += layer.h_s * (kin_t / w.h + rest);
    }
    Ok(total)
}

pub fn boundary_functional(psi: &BoundaryField) -> Result<f64> {
    let layer = &psi.layer;
    functional_columns(psi, 0..layer.n_s, |j| layer.k[j])
}

/// Ansatz functional for `psi = g exp(-i (S/eps + delta s))`. `g` is sampled on
/// the layer grid; `s_phase` holds `S(s_j)` for `j = 0..=n_s`, the last entry
/// being `S(|boundary|)`.
pub fn ansatz_energy(g: &[f64], s_phase: &[f64], layer: &LayerGrid) -> Result<f64> {
    let (n_t, n_s) = (layer.grid.n, layer.n_s);
    if g.len() != n_s * n_t || s_phase.len() != n_s + 1 {
        return Err(Error::InvalidParameter("ansatz samples do not match the layer grid".into()));
    }
    let b = layer.params.b;
    let eps = layer.params.eps;
    let h = layer.h_s;
    let rs = (eps / h).powi(2);
    let mut total = 0.0;
    for j in 0..n_s {
        let k = layer.k[j];
        let w = layer.column(k)?;
        let col = &g[j * n_t..(j + 1) * n_t];
        let jn = (j + 1) % n_s;
        let next = &g[jn * n_t..(jn + 1) * n_t];
        let ds = (s_phase[j + 1] - s_phase[j]) / h;
        let mut kin_t = 0.0;
        for i in 0..n_t - 1 {
            let d = col[i + 1] - col[i];
            kin_t += w.edge[i] * d * d;
        }
        let mut rest = 0.0;
        for i in 0..n_t {
            let t = layer.grid.node(i);
            let x = wrap_angle(h / eps * (ds + t - 0.5 * eps * k * t * t));
            let d = next[i] - col[i];
            let s_term = rs * (d * d + col[i] * next[i] * x * x) / (w.metric[i] * w.metric[i]);
            let g2 = col[i] * col[i];
            rest += w.node[i] * (s_term - (2.0 * g2 - g2 * g2) / (2.0 * b));
        }
        total += h * (kin_t / w.h + rest);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialState {
    pub reference: ReferenceProfile,
    pub layer: LayerGrid,
    /// Density samples on the layer grid.
    pub g: Vec<f64>,
    /// `S(s_j)` for `j = 0..=n_s`.
    pub s_phase: Vec<f64>,
    /// `S_loc(s_n)` at the left end of every cell, plus the total.
    pub s_loc_start: Vec<f64>,
    /// Endpoint value of the closing correction `S_glo(|boundary|)`.
    pub s_glo_end: f64,
    pub delta_eps: f64,
    /// Winding integer `(S(L) + eps delta L) / (2 pi eps)`.
    pub winding: i64,
}

pub fn build_trial(geom: &BoundaryGeometry, params: &ProblemParams) -> Result<TrialState> {
    build_trial_with(geom, params, DEFAULT_GRID_NODES, DEFAULT_NODES_PER_CELL)
}

pub fn build_trial_with(
    geom: &BoundaryGeometry,
    params: &ProblemParams,
    grid_nodes: usize,
    nodes_per_cell: usize,
) -> Result<TrialState> {
    let reference = reference_profile_with(geom, params, grid_nodes)?;
    trial_from_reference(geom, reference, nodes_per_cell)
}

pub fn trial_from_reference(
    geom: &BoundaryGeometry,
    reference: ReferenceProfile,
    nodes_per_cell: usize,
) -> Result<TrialState> {
    let params = reference.params;
    let cells = &reference.cells;
    let layer = LayerGrid::new(geom, cells, reference.grid(), &params, nodes_per_cell);
    let n_cells = cells.n_cells;
    let ell = cells.ell_eps;

    let mut s_loc_start = Vec::with_capacity(n_cells + 1);
    let mut acc = 0.0;
    for p in &reference.pairs {
        s_loc_start.push(acc);
        acc += p.alpha_star * ell;
    }
    s_loc_start.push(acc);

    let eps = params.eps;
    let total = acc + eps * params.delta_eps * geom.length;
    let winding = (total / (2.0 * PI * eps)).round();
    let s_glo_end = 2.0 * PI * eps * winding - total;

    let mut trial = TrialState {
        reference,
        layer,
        g: Vec::new(),
        s_phase: Vec::new(),
        s_loc_start,
        s_glo_end,
        delta_eps: params.delta_eps,
        winding: winding as i64,
    };
    let n_t = trial.layer.grid.n;
    let mut g = Vec::with_capacity(trial.layer.n_s * n_t);
    for j in 0..trial.layer.n_s {
        let s = trial.layer.s(j);
        let (n, lam) = trial.locate(s);
        let a = &trial.reference.pairs[n].profile.values;
        let b = &trial.reference.pairs[(n + 1) % n_cells].profile.values;
        g.extend((0..n_t).map(|i| (1.0 - lam) * a[i] + lam * b[i]));
    }
    trial.g = g;
    trial.s_phase = (0..=trial.layer.n_s)
        .map(|j| {
            if j == trial.layer.n_s {
                trial.phase_end()
            } else {
                trial.phase(trial.layer.s(j))
            }
        })
        .collect();
    Ok(trial)
}

impl TrialState {
    pub fn cells(&self) -> &CellDecomposition {
        &self.reference.cells
    }

    pub fn params(&self) -> &ProblemParams {
        &self.reference.params
    }

    /// Cell index and blend fraction `(s - s_n)/l_eps` for `s` in `[0, L)`.
    fn locate(&self, s: f64) -> (usize, f64) {
        let cells = self.cells();
        let n = cells.cell_of(s);
        let s = s.rem_euclid(self.layer.length);
        let lam = ((s - cells.cells[n].s_lo) / cells.ell_eps).clamp(0.0, 1.0);
        (n, lam)
    }

    /// `S(L)`, kept separate from `S(0) = 0` so the closure is visible.
    pub fn phase_end(&self) -> f64 {
        self.s_loc_start[self.cells().n_cells] + self.s_glo_end
    }

    /// `S = S_loc + S_glo` at `s` in `[0, L)`.
    pub fn phase(&self, s: f64) -> f64 {
        let (n, _) = self.locate(s);
        let s = s.rem_euclid(self.layer.length);
        let cell = &self.cells().cells[n];
        let s_loc = self.s_loc_start[n] + self.reference.pairs[n].alpha_star * (s - cell.s_lo);
        s_loc + self.s_glo_end * smoothstep5(s / self.layer.length)
    }

    pub fn phase_deriv(&self, s: f64) -> f64 {
        let (n, _) = self.locate(s);
        self.reference.pairs[n].alpha_star
            + self.s_glo_end * smoothstep5_deriv(s.rem_euclid(self.layer.length) / self.layer.length) / self.layer.length
    }

    /// `g(s, t)`; the profiles are interpolated linearly in `t` and extended
    /// by their end value beyond the layer.
    pub fn density(&self, s: f64, t: f64) -> f64 {
        let (n, lam) = self.locate(s);
        let nc = self.cells().n_cells;
        let a = &self.reference.pairs[n].profile;
        let b = &self.reference.pairs[(n + 1) % nc].profile;
        let tc = t.min(a.grid.t1);
        (1.0 - lam) * a.eval(tc) + lam * b.eval(tc)
    }

    /// `chi_n(s, t)`, the blend correction on top of `f_n`.
    pub fn chi(&self, s: f64, t: f64) -> f64 {
        let (n, lam) = self.locate(s);
        let nc = self.cells().n_cells;
        let a = self.reference.pairs[n].profile.eval(t);
        let b = self.reference.pairs[(n + 1) % nc].profile.eval(t);
        lam * (b - a)
    }

    /// `(max |chi|, max |d_s chi|)` over the layer grid.
    pub fn chi_bounds(&self) -> (f64, f64) {
        let nc = self.cells().n_cells;
        let ell = self.cells().ell_eps;
        let mut m0: f64 = 0.0;
        let mut m1: f64 = 0.0;
        for n in 0..nc {
            let a = &self.reference.pairs[n].profile.values;
            let b = &self.reference.pairs[(n + 1) % nc].profile.values;
            let jump = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            m0 = m0.max(jump);
            m1 = m1.max(jump / ell);
        }
        (m0, m1)
    }

    /// `(S(L) + eps delta L)/(2 pi eps) - winding`.
    pub fn closure_residual(&self) -> f64 {
        let eps = self.params().eps;
        (self.phase_end() + eps * self.delta_eps * self.layer.length) / (2.0 * PI * eps) - self.winding as f64
    }

    pub fn psi(&self, s: f64, t: f64) -> Complex64 {
        let eps = self.params().eps;
        Complex64::from_polar(self.density(s, t), -(self.phase(s) / eps + self.delta_eps * s))
    }

    /// Trial state assembled on its layer grid.
    pub fn field(&self) -> BoundaryField {
        let eps = self.params().eps;
        let n_t = self.layer.grid.n;
        let mut values = Vec::with_capacity(self.g.len());
        for j in 0..self.layer.n_s {
            let s = self.layer.s(j);
            let ph = -(self.s_phase[j] / eps + self.delta_eps * s);
            let (sn, cs) = ph.sin_cos();
            values.extend(self.g[j * n_t..(j + 1) * n_t].iter().map(|g| Complex64::new(g * cs, g * sn)));
        }
        BoundaryField {
            layer: self.layer.clone(),
            values,
            periodic: true,
        }
    }

    pub fn ansatz_energy(&self) -> Result<f64> {
        ansatz_energy(&self.g, &self.s_phase, &self.layer)
    }

    /// `sum_n l_eps E*(k_n)`.
    pub fn riemann_energy(&self) -> f64 {
        let ell = self.cells().ell_eps;
        self.reference.pairs.iter().map(|p| ell * p.energy).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingRow {
    pub cell: usize,
    /// Cell functional with the curvature frozen to `k_n`.
    pub e_gl: f64,
    /// `l_eps E*(k_n)`.
    pub e_star: f64,
    /// Reduced functional of `u_n`.
    pub e_reduced: f64,
    pub residual: f64,
}

/// Splits the cell functionals as `E_n[psi] = l E*(k_n) + F_n[u_n]` with
/// `u_n = psi exp(i (alpha_n/eps + delta) s) / f_n` and reports the residual of
/// the identity per cell.
pub fn decoupling_check(psi: &BoundaryField, reference: &ReferenceProfile) -> Result<Vec<DecouplingRow>> {
    let layer = &psi.layer;
    let cells = &reference.cells;
    let m = layer.nodes_per_cell;
    if cells.n_cells * m != layer.n_s || *reference.grid() != layer.grid {
        return Err(Error::InvalidParameter("field and reference profile use different grids".into()));
    }
    let (n_t, n_s) = (layer.grid.n, layer.n_s);
    let params = &layer.params;
    let (eps, b, h) = (params.eps, params.b, layer.h_s);
    let rs = (eps / h).powi(2);

    let mut rows = Vec::with_capacity(cells.n_cells);
    for (n, pair) in reference.pairs.iter().enumerate() {
        let k = cells.cells[n].k;
        let f = &pair.profile.values;
        if let Some(i) = f.iter().position(|x| *x < crate::costfn::DIVISION_GUARD) {
            return Err(Error::InvalidParameter(format!(
                "cell {n}: reference profile vanishes at node {i}"
            )));
        }
        let alpha = pair.alpha_star;
        let js = n * m..(n + 1) * m;
        let e_gl = functional_columns(psi, js.clone(), |_| k)?;

        let w = Weights::new(&layer.grid, k, alpha, eps)?;
        let u_at = |j: usize| -> Vec<Complex64> {
            // s is taken unwrapped so u_n stays smooth across the period.
            let s = j as f64 * h;
            let rot = Complex64::from_polar(1.0, (alpha / eps + params.delta_eps) * s);
            let jj = j % n_s;
            (0..n_t).map(|i| psi.values[jj * n_t + i] * rot / f[i]).collect()
        };
        let mut e_red = 0.0;
        let mut u = u_at(js.start);
        for j in js {
            let un = u_at(j + 1);
            let mut kin_t = 0.0;
            for i in 0..n_t - 1 {
                kin_t += w.edge[i] * f[i] * f[i + 1] * (u[i + 1] - u[i]).norm_sqr();
            }
            let mut rest = 0.0;
            for i in 0..n_t {
                let t = layer.grid.node(i);
                let beta = t + alpha - 0.5 * eps * k * t * t;
                let x = h / eps * beta;
                let u2 = u[i].norm_sqr();
                let s_term = f[i] * f[i] * (rs * link(u[i], un[i], -x) - beta * beta * u2) / (w.metric[i] * w.metric[i]);
                let pot = f[i].powi(4) * (1.0 - u2) * (1.0 - u2) / (2.0 * b);
                rest += w.node[i] * (s_term + pot);
            }
            e_red += h * (kin_t / w.h + rest);
            u = un;
        }
        let e_star = cells.ell_eps * pair.energy;
        rows.push(DecouplingRow {
            cell: n,
            e_gl,
            e_star,
            e_reduced: e_red,
            residual: (e_gl - e_star - e_red).abs(),
        });
    }
    Ok(rows)
}

/// Convenience: decomposition-consistent layer for a geometry.
pub fn layer_for(geom: &BoundaryGeometry, params: &ProblemParams, grid: &Grid1D, nodes_per_cell: usize) -> Result<LayerGrid> {
    let cells = decompose(geom, params)?;
    Ok(LayerGrid::new(geom, &cells, grid, params, nodes_per_cell))
}
