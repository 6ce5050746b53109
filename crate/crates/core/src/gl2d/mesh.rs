//! Boundary-fitted meshes in tubular coordinates `r(s, tau) = gamma(s) + tau nu(s)`.
//!
//! Nodes sit on rings of constant depth `tau`; ring 0 is the boundary. Only a
//! collar around the boundary is meshed; the order parameter vanishes on its
//! inner edge and in the core.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryGeometry;
use crate::error::{Error, Result};
use crate::params::ProblemParams;

/// Largest normal spacing, in units of `eps`, anywhere in the collar. Coarser
/// rings decouple and let the lattice carry spurious bulk superconductivity.
pub const MAX_SPACING_PER_EPS: f64 = 0.25;
/// Collars stop at this fraction of the focal distance `1/k_max`.
pub const FOLD_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshOptions {
    /// Tangential nodes per unit `eps` of boundary length.
    pub tangential_per_eps: f64,
    /// Normal nodes per unit `eps` of depth inside the layer.
    pub normal_per_eps: f64,
    /// Spacing growth factor past the layer.
    pub growth: f64,
    /// Collar depth in units of `t_eps * eps`.
    pub collar_factor: f64,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self {
            tangential_per_eps: 16.0,
            normal_per_eps: 16.0,
            growth: 1.15,
            collar_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh2D {
    pub n_s: usize,
    pub h_s: f64,
    pub length: f64,
    /// Ring depths, `taus[0] = 0`.
    pub taus: Vec<f64>,
    pub nodes: Vec<[f64; 2]>,
    /// Dual-cell areas.
    pub area: Vec<f64>,
    pub edge_a: Vec<u32>,
    pub edge_b: Vec<u32>,
    pub edge_w: Vec<f64>,
    /// Closed primal faces as node loops (counterclockwise), for curl checks.
    pub faces: Vec<Vec<u32>>,
    pub options: MeshOptions,
}

fn ring_depths(params: &ProblemParams, opts: &MeshOptions, tau_max: f64) -> Vec<f64> {
    let eps = params.eps;
    let h0 = eps / opts.normal_per_eps;
    let h_cap = eps * MAX_SPACING_PER_EPS;
    let layer = params.t_eps * eps;
    let mut taus = vec![0.0];
    let n_fine = (layer.min(tau_max) / h0).ceil() as usize;
    let hf = layer.min(tau_max) / n_fine as f64;
    for r in 1..=n_fine {
        taus.push(r as f64 * hf);
    }
    let mut h = hf;
    let mut tau = *taus.last().unwrap();
    while tau < tau_max {
        h = (h * opts.growth).min(h_cap);
        let next = tau + h;
        if next >= tau_max - 0.25 * h {
            taus.push(tau_max);
            break;
        }
        taus.push(next);
        tau = next;
    }
    taus
}

impl Mesh2D {
    pub fn new(geom: &BoundaryGeometry, params: &ProblemParams, opts: &MeshOptions) -> Result<Self> {
        let eps = params.eps;
        let n_s = ((geom.length / (eps / opts.tangential_per_eps)).ceil() as usize).max(16);
        let h_s = geom.length / n_s as f64;
        let layer = params.t_eps * eps;

        // The tubular map folds at depth 1/k_max; keep clear of it.
        let fold = if geom.k_max > 0.0 { FOLD_FRACTION / geom.k_max } else { f64::INFINITY };
        let collar = (opts.collar_factor * layer).min(fold);
        if collar < layer * (1.0 - 1e-12) {
            return Err(Error::CollarCoverage { collar, needed: layer });
        }
        let taus = ring_depths(params, opts, collar);
        let n_r = taus.len();

        let frames: Vec<([f64; 2], [f64; 2], f64)> = (0..n_s).map(|j| geom.frame(j as f64 * h_s)).collect();
        let mut nodes = Vec::with_capacity(n_r * n_s);
        for &tau in &taus {
            for (p, t, _) in &frames {
                nodes.push([p[0] - tau * t[1], p[1] + tau * t[0]]);
            }
        }

        let idx = |r: usize, j: usize| (r * n_s + (j % n_s)) as u32;
        // Dual width in tau of each ring.
        let dual: Vec<f64> = (0..n_r)
            .map(|r| {
                let lo = if r == 0 { 0.0 } else { 0.5 * (taus[r] - taus[r - 1]) };
                let hi = if r + 1 < n_r { 0.5 * (taus[r + 1] - taus[r]) } else { 0.0 };
                lo + hi
            })
            .collect();

        let mut area = vec![0.0; nodes.len()];
        let (mut ea, mut eb, mut ew) = (Vec::new(), Vec::new(), Vec::new());
        let mut faces = Vec::new();
        for r in 0..n_r {
            let lo = if r == 0 { taus[0] } else { 0.5 * (taus[r - 1] + taus[r]) };
            let hi = if r + 1 < n_r { 0.5 * (taus[r] + taus[r + 1]) } else { taus[r] };
            for j in 0..n_s {
                let k = frames[j].2;
                let metric = 1.0 - k * taus[r];
                if metric <= 0.0 {
                    return Err(Error::DegenerateMetric { t: taus[r] / eps, k, metric });
                }
                // Exact integral of the Jacobian over the dual interval.
                area[idx(r, j) as usize] = h_s * ((hi - lo) - 0.5 * k * (hi * hi - lo * lo));
                // Tangential edge.
                let (a, b) = (idx(r, j), idx(r, j + 1));
                let (pa, pb) = (nodes[a as usize], nodes[b as usize]);
                let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
                ea.push(a);
                eb.push(b);
                ew.push(dual[r] / len);
                // Normal edge, pointing inwards.
                if r + 1 < n_r {
                    let tm = 0.5 * (taus[r] + taus[r + 1]);
                    let c = idx(r + 1, j);
                    ea.push(a);
                    eb.push(c);
                    ew.push(h_s * (1.0 - k * tm) / (taus[r + 1] - taus[r]));
                    // Face (r,j) -> (r,j+1) -> (r+1,j+1) -> (r+1,j) is counterclockwise
                    // because the normal points to the left of the tangent.
                    faces.push(vec![a, b, idx(r + 1, j + 1), c]);
                }
            }
        }
        Ok(Self {
            n_s,
            h_s,
            length: geom.length,
            taus,
            nodes,
            area,
            edge_a: ea,
            edge_b: eb,
            edge_w: ew,
            faces,
            options: *opts,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_w.len()
    }

    /// Tubular coordinates `(s, tau)` of a node.
    pub fn tubular(&self, node: usize) -> (f64, f64) {
        let (r, j) = (node / self.n_s, node % self.n_s);
        (j as f64 * self.h_s, self.taus[r])
    }

    /// Nodes of the innermost ring carry the homogeneous Dirichlet condition that
    /// closes the collar. A free inner edge would act as a second surface and
    /// nucleate its own, spurious, surface superconductivity.
    pub fn is_dirichlet(&self, node: usize) -> bool {
        node >= (self.taus.len() - 1) * self.n_s
    }

    /// Boundary nodes in counterclockwise order.
    pub fn boundary_nodes(&self) -> std::ops::Range<usize> {
        0..self.n_s
    }

    pub fn total_area(&self) -> f64 {
        self.area.iter().sum()
    }
}

/// Signed area of a polygon.
pub(crate) fn polygon_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}
