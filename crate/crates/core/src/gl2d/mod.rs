//! Frozen-field 2D Ginzburg-Landau energy on boundary-fitted meshes.

mod diagnostics;
mod field;
mod lift;
mod mesh;
mod minimize;
mod potential;

pub use diagnostics::{
    covariant_winding, density_errors, density_l2_error, mass_beyond, pan_boundary_error, pan_uniform_error,
    winding_number,
};
pub use field::{gl_energy, Field2D};
pub use lift::{cutoff, lift_trial};
pub use mesh::{Mesh2D, MeshOptions, FOLD_FRACTION, MAX_SPACING_PER_EPS};
pub use minimize::{minimize, MinimizeOptions, Minimized};
pub use potential::{vector_potential, FrozenField, VectorField, HARMONIC_MODES};

/// Energy gradient with respect to `(Re psi, Im psi)`, exposed for consistency checks.
pub fn energy_gradient(field: &Field2D) -> (f64, Vec<num_complex::Complex64>) {
    let mut g = vec![num_complex::Complex64::new(0.0, 0.0); field.psi.len()];
    let e = field::energy_gradient(field, &field.psi, &mut g);
    (e, g)
}
