//! Boundary-layer toolkit for surface superconductivity in the 2D
//! Ginzburg-Landau model: curvature-dependent 1D effective problems,
//! cost-function diagnostics, boundary cell decompositions, explicit
//! boundary-layer trial states and a frozen-field 2D minimizer.

pub mod boundary;
pub mod costfn;
pub mod error;
pub mod gl2d;
pub mod io;
pub mod numerics;
pub mod params;
pub mod profile1d;
pub mod spectral;
pub mod trial;

pub use boundary::{
    boundary_energy, decompose, make_geometry, reference_profile, BoundaryEnergy,
    BoundaryGeometry, Cell, CellDecomposition, CurvatureSampling, CurveSpec, ReferenceProfile,
};
pub use costfn::{
    correction_function, cost_function, log_derivative_gap, potential_function, CorrectionDiagnostics,
    CostProfile,
};
pub use error::{Error, Result};
pub use gl2d::{
    density_l2_error, gl_energy, lift_trial, minimize, pan_uniform_error, vector_potential,
    winding_number, Field2D, FrozenField, Mesh2D, MeshOptions, MinimizeOptions, Minimized,
};
pub use params::{Grid1D, ProblemParams};
pub use profile1d::{
    energy_1d, optimal_phase, optimal_phase_near, potential_v, solve_profile, solve_profile_from,
    OptimalPair, Profile1D,
};
pub use spectral::{half_line_eigenvalue, theta0, Theta0};
pub use trial::{
    ansatz_energy, boundary_functional, build_trial, decoupling_check, BoundaryField, LayerGrid,
    TrialState,
};
