//! One geometry/eps/b case carried through boundary energy, trial state and the
//! 2D minimizer, with every diagnostic the reports need.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use surfgl_core::boundary::{boundary_energy_with, BoundaryEnergy, BoundaryGeometry, CurvatureSampling};
use surfgl_core::gl2d::{
    density_errors, gl_energy, lift_trial, minimize, pan_boundary_error, pan_uniform_error, vector_potential,
    winding_number, Field2D, Mesh2D, Minimized,
};
use surfgl_core::params::{Grid1D, ProblemParams};
use surfgl_core::profile1d::{optimal_phase, OptimalPair};
use surfgl_core::trial::{build_trial_with, TrialState};

use crate::config::{Init, RunConfig};
use crate::error::CliError;

/// Pan's threshold `gamma_eps = eps^(1/6) |log eps|`.
pub fn pan_threshold(eps: f64) -> f64 {
    eps.powf(1.0 / 6.0) * eps.ln().abs()
}

pub struct Case2D {
    pub params: ProblemParams,
    pub boundary: BoundaryEnergy,
    pub trial: TrialState,
    pub lifted: Field2D,
    pub minimized: Minimized,
    /// Flat-boundary optimal pair, the profile in Pan's estimate.
    pub flat: OptimalPair,
    pub seconds: f64,
}

/// Scalar summary of a solved case, in `eps`-scaled energy units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub eps: f64,
    pub b: f64,
    pub n_cells: usize,
    /// `sum_n l_eps E*(k_n)`.
    pub riemann: f64,
    pub riemann_refined: f64,
    pub trial_ansatz: f64,
    pub trial_lifted: f64,
    pub minimized: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub gap: f64,
    pub density_error: f64,
    pub density_norm: f64,
    pub density_relative: f64,
    pub pan_gamma: f64,
    pub pan_error: Option<f64>,
    pub pan_note: Option<String>,
    pub pan_boundary: f64,
    pub degree: Option<i64>,
    pub degree_target: f64,
    pub mesh_nodes: usize,
}

/// Same modulus, independent uniformly random phase at every node.
pub fn random_phase(field: &Field2D, seed: u64) -> Field2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = field
        .psi
        .iter()
        .map(|z| Complex64::from_polar(z.norm(), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect();
    field.with_psi(psi)
}

pub fn solve_case(geom: &BoundaryGeometry, b: f64, eps: f64, cfg: &RunConfig) -> Result<Case2D, CliError> {
    let start = Instant::now();
    let params = geom.params(b, eps).map_err(CliError::stage("parameters"))?;
    let boundary = boundary_energy_with(geom, &params, cfg.grid_nodes, CurvatureSampling::CellMean)
        .map_err(CliError::stage("boundary energy"))?;
    let trial =
        build_trial_with(geom, &params, cfg.grid_nodes, cfg.nodes_per_cell).map_err(CliError::stage("trial state"))?;
    let mesh = Arc::new(Mesh2D::new(geom, &params, &cfg.mesh).map_err(CliError::stage("mesh"))?);
    let potential = vector_potential(geom).map_err(CliError::stage("vector potential"))?;
    let lifted = lift_trial(&trial, geom, mesh, &potential).map_err(CliError::stage("lift"))?;
    let init = match cfg.init {
        Init::Trial => lifted.clone(),
        Init::Random => random_phase(&lifted, cfg.seed),
    };
    let minimized = minimize(&init, &cfg.minimize).map_err(CliError::stage("2D minimization"))?;
    let grid = Grid1D::layer(&params, cfg.grid_nodes).map_err(CliError::stage("flat profile"))?;
    let flat = optimal_phase(0.0, &params, &grid).map_err(CliError::stage("flat profile"))?;
    Ok(Case2D {
        params,
        boundary,
        trial,
        lifted,
        minimized,
        flat,
        seconds: start.elapsed().as_secs_f64(),
    })
}

impl Case2D {
    pub fn summary(&self) -> Result<CaseSummary, CliError> {
        let eps = self.params.eps;
        let field = &self.minimized.field;
        let riemann = eps * self.boundary.leading;
        let minimized = eps * self.minimized.energy;
        let (density_error, density_norm) = density_errors(field, &self.trial.reference);
        let gamma = pan_threshold(eps);
        let (pan_error, pan_note) = match pan_uniform_error(field, &self.flat.profile, gamma) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(CaseSummary {
            eps,
            b: self.params.b,
            n_cells: self.boundary.cells.len(),
            riemann,
            riemann_refined: eps * self.boundary.riemann_refined,
            trial_ansatz: self.trial.ansatz_energy().map_err(CliError::stage("trial energy"))?,
            trial_lifted: eps * gl_energy(&self.lifted),
            minimized,
            iterations: self.minimized.iterations,
            grad_norm: self.minimized.grad_norm,
            gap: (minimized - riemann).abs(),
            density_error,
            density_norm,
            density_relative: density_error / density_norm,
            pan_gamma: gamma,
            pan_error,
            pan_note,
            pan_boundary: pan_boundary_error(field, &self.flat.profile),
            degree: winding_number(field).ok(),
            degree_target: std::f64::consts::PI / (eps * eps),
            mesh_nodes: field.mesh.n_nodes(),
        })
    }
}
