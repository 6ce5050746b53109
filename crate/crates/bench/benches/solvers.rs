use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use surfgl_core::gl2d::{energy_gradient, lift_trial, vector_potential, Mesh2D, MeshOptions};
use surfgl_core::params::{Grid1D, ProblemParams};
use surfgl_core::{make_geometry, optimal_phase, solve_profile, theta0, trial, CurveSpec};

fn one_d(c: &mut Criterion) {
    let params = ProblemParams::with_default_width(1.4, 0.02, 1.0).unwrap();
    let grid = Grid1D::layer(&params, 2048).unwrap();
    c.bench_function("solve_profile k=0 alpha=-0.77", |b| {
        b.iter(|| solve_profile(black_box(0.0), -0.77, &params, &grid).unwrap())
    });
    c.bench_function("optimal_phase k=1", |b| b.iter(|| optimal_phase(black_box(1.0), &params, &grid).unwrap()));
    c.bench_function("theta0 n=2048", |b| b.iter(|| theta0(black_box(2048), (-2.0, 0.0)).unwrap()));
}

fn two_d(c: &mut Criterion) {
    let geom = make_geometry(&CurveSpec::circle(1.0)).unwrap();
    let params = geom.params(1.4, 0.08).unwrap();
    let state = trial::build_trial(&geom, &params).unwrap();
    let mesh = Arc::new(Mesh2D::new(&geom, &params, &MeshOptions::default()).unwrap());
    let pot = vector_potential(&geom).unwrap();
    let field = lift_trial(&state, &geom, mesh, &pot).unwrap();
    c.bench_function("gl2d energy+gradient disc eps=0.08", |b| b.iter(|| energy_gradient(black_box(&field))));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = one_d, two_d
}
criterion_main!(benches);
