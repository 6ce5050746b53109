use std::f64::consts::PI;

use proptest::prelude::*;
use surfgl_core::numerics::*;

#[test]
fn tridiagonal_matches_dense_product() {
    let n = 50;
    // lower[i] sits in row i + 1, upper[i] in row i.
    let lower: Vec<f64> = (0..n - 1).map(|i| -1.0 + 0.01 * i as f64).collect();
    let upper: Vec<f64> = vec![-0.7; n - 1];
    let diag: Vec<f64> = (0..n).map(|i| 3.0 + (i as f64).sin()).collect();
    let x_true: Vec<f64> = (0..n).map(|i| (0.3 * i as f64).cos()).collect();
    let rhs: Vec<f64> = (0..n)
        .map(|i| {
            let mut v = diag[i] * x_true[i];
            if i > 0 {
                v += lower[i - 1] * x_true[i - 1];
            }
            if i + 1 < n {
                v += upper[i] * x_true[i + 1];
            }
            v
        })
        .collect();
    let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
    for (a, b) in x.iter().zip(&x_true) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn brent_finds_minimum_and_root() {
    let m = brent_minimize(|x| Ok((x - 0.3).powi(2) + 1.0), -2.0, 2.0, 1e-10, 200).unwrap();
    assert!((m.x - 0.3).abs() < 1e-7);
    let r = brent_root(|x| Ok(x.cos() - x), 0.0, 1.0, 1e-14, 200).unwrap();
    assert!((r - 0.739_085_133_215_160_6).abs() < 1e-12);
}

#[test]
fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
    let rule = gauss_legendre(12);
    for p in 0..24 {
        let got = integrate_gl(|x| x.powi(p), 0.0, 2.0, &rule);
        let exact = 2f64.powi(p + 1) / (p + 1) as f64;
        assert!((got - exact).abs() < 1e-12 * exact, "degree {p}");
    }
    let s = integrate_gl(|x| x.sin(), 0.0, PI, &gauss_legendre(20));
    assert!((s - 2.0).abs() < 1e-14);
}

#[test]
fn cubic_roots_recover_factored_cubic() {
    let mut r = cubic_roots(2.0, -1.0, -8.0, 0.0);
    r.sort_by(f64::total_cmp);
    // 2 x (x^2 - 0.5 x - 4): roots 0 and (0.5 +- sqrt(16.25))/2.
    let d = 16.25f64.sqrt();
    let want = [(0.5 - d) / 2.0, 0.0, (0.5 + d) / 2.0];
    assert_eq!(r.len(), 3);
    for (a, b) in r.iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn finite_differences_are_second_order() {
    let err = |n: usize| {
        let h = 1.0 / (n - 1) as f64;
        let v: Vec<f64> = (0..n).map(|i| (2.0 * i as f64 * h).sin()).collect();
        derivative(&v, h)
            .iter()
            .enumerate()
            .map(|(i, d)| (d - 2.0 * (2.0 * i as f64 * h).cos()).abs())
            .fold(0.0, f64::max)
    };
    let ratio = err(101) / err(201);
    assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
}

#[test]
fn cumulative_trapezoid_and_interpolation() {
    let h = 0.01;
    let v: Vec<f64> = (0..101).map(|i| i as f64 * h).collect();
    let c = cumulative_trapezoid(&v, h);
    assert!((c[100] - 0.5).abs() < 1e-14);
    assert!((interp_uniform(&v, h, 0.505) - 0.505).abs() < 1e-14);
    assert_eq!(interp_uniform(&v, h, 5.0), 1.0);
}

proptest! {
    #[test]
    fn wrap_angle_lands_in_principal_range(x in -1e3f64..1e3) {
        let w = wrap_angle(x);
        prop_assert!(w > -PI - 1e-12 && w <= PI + 1e-12);
        let k = ((x - w) / (2.0 * PI)).round();
        prop_assert!((x - w - 2.0 * PI * k).abs() < 1e-9);
    }

    #[test]
    fn smoothstep_is_monotone_and_clamped(a in -0.5f64..1.5, b in -0.5f64..1.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(smoothstep5(lo) <= smoothstep5(hi));
        prop_assert!((0.0..=1.0).contains(&smoothstep5(a)));
    }
}
