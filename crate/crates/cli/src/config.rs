use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use surfgl_core::gl2d::{MeshOptions, MinimizeOptions};
use surfgl_core::params::DEFAULT_GRID_NODES;
use surfgl_core::CurveSpec;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    Trial,
    Random,
}

/// Pass/fail thresholds. Defaults are the acceptance values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub el_residual: f64,
    pub energy_identity: f64,
    pub stationarity: f64,
    pub sup_slack: f64,
    pub min_cost: f64,
    pub theta0: f64,
    pub mu0: f64,
    pub riemann: f64,
    pub slack_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            el_residual: 1e-8,
            energy_identity: 1e-6,
            stationarity: 1e-6,
            sup_slack: 1e-8,
            min_cost: -1e-8,
            theta0: 1e-5,
            mu0: 1e-4,
            riemann: 1e-4,
            slack_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub b: Vec<f64>,
    pub eps: Vec<f64>,
    pub k: Vec<f64>,
    pub geometry: Option<PathBuf>,
    pub grid_nodes: usize,
    pub theta0_resolution: usize,
    /// Cost-function margin; `None` means `|log eps|^-5`.
    pub d_eps: Option<f64>,
    pub nodes_per_cell: usize,
    pub mesh: MeshOptions,
    pub minimize: MinimizeOptions,
    pub init: Init,
    pub seed: u64,
    /// Row stride for trial-state sample CSVs.
    pub csv_stride: usize,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            b: vec![1.2, 1.4, 1.6],
            eps: vec![0.04, 0.02],
            k: vec![-1.0, 0.0, 1.0],
            geometry: None,
            grid_nodes: DEFAULT_GRID_NODES,
            theta0_resolution: 2048,
            d_eps: None,
            nodes_per_cell: surfgl_core::trial::DEFAULT_NODES_PER_CELL,
            mesh: MeshOptions::default(),
            minimize: MinimizeOptions::default(),
            init: Init::Trial,
            seed: 0,
            csv_stride: 4,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.eps.is_empty() {
            return Err(CliError::Usage("empty eps list".into()));
        }
        if let Some(e) = self.eps.iter().find(|&&e| !(e > 0.0 && e <= 0.2)) {
            return Err(CliError::Usage(format!("eps = {e} outside (0, 0.2]")));
        }
        if self.b.is_empty() {
            return Err(CliError::Usage("empty b list".into()));
        }
        if let Some(b) = self.b.iter().find(|&&b| !(b > 0.0)) {
            return Err(CliError::Usage(format!("b = {b} must be positive")));
        }
        if let Some(g) = &self.geometry {
            if !g.is_file() {
                return Err(CliError::Usage(format!("geometry file {} not found", g.display())));
            }
        }
        Ok(())
    }

    pub fn curve(&self) -> Result<CurveSpec, CliError> {
        match &self.geometry {
            None => Ok(CurveSpec::circle(1.0)),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::Usage(format!("geometry {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("geometry {}: {e}", p.display())))
            }
        }
    }

    /// SHA-256 over the canonical JSON of the configuration and of the curve.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("config serializes"));
        if let Ok(curve) = self.curve() {
            h.update(geometry_hash(&curve));
        }
        hex::encode(h.finalize())
    }
}

pub fn geometry_hash(curve: &CurveSpec) -> String {
    hex::encode(Sha256::digest(serde_json::to_vec(curve).expect("curve serializes")))
}

/// Output directory, created on demand.
pub fn ensure_dir(dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("output directory {}: {e}", dir.display())))?;
    Ok(dir.to_path_buf())
}
