use surfgl_core::costfn::*;
use surfgl_core::params::{Grid1D, ProblemParams};
use surfgl_core::profile1d::{optimal_phase, OptimalPair};
use surfgl_core::Error;

fn pair(b: f64, k: f64, eps: f64, n: usize) -> OptimalPair {
    let p = ProblemParams::with_default_width(b, eps, 1.0).unwrap();
    let grid = Grid1D::layer(&p, n).unwrap();
    optimal_phase(k, &p, &grid).unwrap()
}

#[test]
fn potential_function_matches_plain_quadrature() {
    let pr = pair(1.4, 0.5, 0.04, 2049);
    let cp = potential_function(&pr);
    let f = &pr.profile;
    let (eps, k, a) = (f.params.eps, f.k, f.alpha);
    // Simpson over the whole layer with the unscaled integrand.
    let g = |i: usize| {
        let t = f.grid.node(i);
        2.0 * f.values[i].powi(2) * (t + a - 0.5 * eps * k * t * t) / (1.0 - eps * k * t)
    };
    let n = f.grid.n;
    assert_eq!(n % 2, 1);
    let mut s = g(0) + g(n - 1);
    for i in 1..n - 1 {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i);
    }
    s *= f.grid.h / 3.0;
    assert_eq!(cp.f_pot[0], 0.0);
    let scale = f.l2_norm_sq();
    assert!((cp.f_pot[n - 1] - s).abs() <= 1e-4 * scale, "{} vs {s}", cp.f_pot[n - 1]);
    // The endpoint value is the stationarity integral: ~0 at the optimal phase.
    assert!(cp.f_pot[n - 1].abs() <= 1e-6 * scale);
}

#[test]
fn cost_is_nonnegative_across_parameters() {
    for &b in &[1.2, 1.6] {
        for &k in &[-1.0, 0.0, 1.0] {
            let pr = pair(b, k, 0.02, 2048);
            let cp = potential_function(&pr);
            let d = cp.base.params.max_d_eps().min(cp.base.params.log_eps().powi(-5));
            let kc = cost_function(&cp, d).unwrap();
            assert!(kc.min_k.unwrap() >= -1e-8, "b {b} k {k}: {}", kc.min_k.unwrap());
            assert!(kc.t_bar > 0.0 && kc.t_bar <= cp.base.grid.t1);
        }
    }
}

#[test]
fn larger_margin_lowers_cost() {
    let cp = potential_function(&pair(1.4, 0.0, 0.04, 1024));
    let max = cp.base.params.max_d_eps();
    let lo = cost_function(&cp, 0.0).unwrap();
    let hi = cost_function(&cp, max).unwrap();
    for (a, b) in lo.k_cost.unwrap().iter().zip(hi.k_cost.unwrap()) {
        assert!(b <= *a);
    }
}

#[test]
fn margin_outside_range_is_rejected() {
    let cp = potential_function(&pair(1.4, 0.0, 0.04, 512));
    let max = cp.base.params.max_d_eps();
    assert!((max - cp.base.params.log_eps().powi(-4)).abs() < 1e-15);
    for d in [-1e-3, 1.01 * max, f64::NAN] {
        assert!(matches!(cost_function(&cp, d), Err(Error::MarginOutOfRange { .. })));
    }
}

#[test]
fn correction_vanishes_for_equal_curvature() {
    let a = pair(1.4, 0.3, 0.04, 1024);
    let c = correction_function(&a, &a).unwrap();
    assert!(c.i_corr.iter().all(|v| v.abs() <= 1e-14));
    assert!(c.sup_ratio <= 1e-12, "{}", c.sup_ratio);
    assert_eq!(c.logderiv_gap, 0.0);
    assert_eq!(c.excluded, 0);
}

#[test]
fn correction_is_small_for_nearby_curvature() {
    let eps = 0.04;
    let a = pair(1.4, 0.0, eps, 1024);
    let b = pair(1.4, 0.2, eps, 1024);
    let c = correction_function(&a, &b).unwrap();
    assert!(c.sup_ratio.is_finite() && c.sup_ratio > 0.0, "{}", c.sup_ratio);
    // Bounded by a modest multiple of eps |k - k'|.
    assert!(c.sup_ratio / (eps * 0.2) < 10.0, "{}", c.sup_ratio);
}

#[test]
fn mismatched_grids_are_rejected() {
    let a = pair(1.4, 0.0, 0.04, 512);
    let b = pair(1.4, 0.0, 0.04, 1024);
    assert!(correction_function(&a, &b).is_err());
    assert!(log_derivative_gap(&a, &b).is_err());
}
