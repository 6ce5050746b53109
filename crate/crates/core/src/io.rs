//! Plain-text serialization: CSV for arrays, JSON for metadata.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryEnergy;
use crate::gl2d::Field2D;
use crate::numerics::derivative;
use crate::profile1d::{OptimalPair, Profile1D};
use crate::trial::TrialState;

/// Fixed 15-significant-digit rendering so repeated runs diff byte-for-byte.
pub fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn profile_csv(p: &Profile1D) -> String {
    let fp = derivative(&p.values, p.grid.h);
    let mut out = String::from("t,f,fprime\n");
    for (i, (f, d)) in p.values.iter().zip(&fp).enumerate() {
        let _ = writeln!(out, "{},{},{}", sig15(p.grid.node(i)), sig15(*f), sig15(*d));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub n: usize,
    pub t1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalPairRecord {
    pub k: f64,
    pub alpha: f64,
    pub energy: f64,
    pub residual: f64,
    pub grid: GridRecord,
}

impl From<&OptimalPair> for OptimalPairRecord {
    fn from(p: &OptimalPair) -> Self {
        Self {
            k: p.profile.k,
            alpha: p.alpha_star,
            energy: p.energy,
            residual: p.profile.residual_norm(),
            grid: GridRecord {
                n: p.profile.grid.n,
                t1: p.profile.grid.t1,
            },
        }
    }
}

pub fn cells_csv(be: &BoundaryEnergy) -> String {
    let mut out = String::from("n,s_lo,s_hi,k_n,alpha_n,E1D\n");
    for c in &be.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.n,
            sig15(c.s_lo),
            sig15(c.s_hi),
            sig15(c.k_n),
            sig15(c.alpha_n),
            sig15(c.e1d)
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialManifest {
    pub eps: f64,
    pub b: f64,
    pub t_eps: f64,
    pub delta_eps: f64,
    pub n_cells: usize,
    pub n_s: usize,
    pub n_t: usize,
    pub winding: i64,
    pub phase_end: f64,
    pub closure_residual: f64,
    pub energy: f64,
}

impl TrialManifest {
    pub fn new(trial: &TrialState, energy: f64) -> Self {
        let p = trial.params();
        Self {
            eps: p.eps,
            b: p.b,
            t_eps: p.t_eps,
            delta_eps: trial.delta_eps,
            n_cells: trial.cells().n_cells,
            n_s: trial.layer.n_s,
            n_t: trial.layer.grid.n,
            winding: trial.winding,
            phase_end: trial.phase_end(),
            closure_residual: trial.closure_residual(),
            energy,
        }
    }
}

/// Samples `s,t,g,S` on every `stride`-th layer node in each direction.
pub fn trial_csv(trial: &TrialState, stride: usize) -> String {
    let stride = stride.max(1);
    let layer = &trial.layer;
    let mut out = String::from("s,t,g,S\n");
    for j in (0..layer.n_s).step_by(stride) {
        let s = layer.s(j);
        for i in (0..layer.grid.n).step_by(stride) {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                sig15(s),
                sig15(layer.grid.node(i)),
                sig15(trial.g[layer.index(j, i)]),
                sig15(trial.s_phase[j])
            );
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldManifest {
    pub eps: f64,
    pub b: f64,
    pub geometry_hash: String,
    pub energy: f64,
    pub degree: Option<i64>,
    pub nodes: usize,
}

pub fn field_csv(field: &Field2D) -> String {
    let mut out = String::from("x,y,Re,Im,abs\n");
    for (p, z) in field.mesh.nodes.iter().zip(&field.psi) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sig15(p[0]),
            sig15(p[1]),
            sig15(z.re),
            sig15(z.im),
            sig15(z.norm())
        );
    }
    out
}
