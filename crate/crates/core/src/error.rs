use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate metric: 1 - eps*k*t = {metric:.3e} at t = {t}, k = {k}")]
    DegenerateMetric { t: f64, k: f64, metric: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("no interior minimum of the phase energy in [{lo}, {hi}] (best alpha {best})")]
    BracketFailure { lo: f64, hi: f64, best: f64 },

    #[error("margin d_eps = {d_eps:.3e} outside (0, {max:.3e}]")]
    MarginOutOfRange { d_eps: f64, max: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("curve has zero speed near parameter {xi}")]
    ZeroSpeed { xi: f64 },

    #[error("curve is self-intersecting or not counterclockwise (turning number {turning:.6})")]
    SelfIntersection { turning: f64 },

    #[error("too few boundary cells: {n} < 8")]
    TooFewCells { n: usize },

    #[error("cell {cell}: {source}")]
    Cell {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("mesh collar of thickness {collar:.4} does not cover the layer (need {needed:.4})")]
    CollarCoverage { collar: f64, needed: f64 },

    #[error("the region f0(t) >= {gamma:.4} is empty")]
    EmptyRegion { gamma: f64 },

    #[error("order parameter vanishes on the boundary (min |psi| = {min_modulus:.3e})")]
    ZeroOnBoundary { min_modulus: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_cell(self, cell: usize) -> Error {
        Error::Cell {
            cell,
            source: Box::new(self),
        }
    }

    /// True for failures of an iterative solver or bracketed search.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::NonConvergence { .. } | Error::BracketFailure { .. } => true,
            Error::Cell { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}
