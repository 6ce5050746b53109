use std::f64::consts::PI;

use surfgl_core::boundary::*;
use surfgl_core::params::Grid1D;
use surfgl_core::params::DEFAULT_GRID_NODES;
use surfgl_core::profile1d::optimal_phase;
use surfgl_core::Error;

/// Ellipse perimeter from the Gauss–Kummer series.
fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    let h = ((a - b) / (a + b)).powi(2);
    let (mut sum, mut c, mut hn) = (1.0, 1.0, 1.0);
    for n in 1..200 {
        // binom(1/2, n)
        c *= (0.5 - (n - 1) as f64) / n as f64;
        hn *= h;
        sum += c * c * hn;
    }
    PI * (a + b) * sum
}

#[test]
fn circle_closed_forms() {
    for r in [0.5, 1.0, 3.0] {
        let g = make_geometry(&CurveSpec::circle(r)).unwrap();
        assert!((g.length - 2.0 * PI * r).abs() <= 1e-12 * r);
        assert!((g.area - PI * r * r).abs() <= 1e-12 * r * r);
        assert!((g.k_max - 1.0 / r).abs() <= 1e-10 && (g.k_min - 1.0 / r).abs() <= 1e-10);
        assert!(g.kprime_max <= 1e-9);
        for s in [0.0, 0.3, 2.0, g.length - 1e-3] {
            assert!((g.curvature(s) - 1.0 / r).abs() <= 1e-10);
            let p = g.point(s);
            assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - r).abs() <= 1e-10);
        }
    }
}

#[test]
fn ellipse_closed_forms() {
    let (a, b) = (2.0, 1.0);
    let g = make_geometry(&CurveSpec::ellipse(a, b)).unwrap();
    assert!((g.length - ellipse_perimeter(a, b)).abs() <= 1e-10);
    assert!((g.area - PI * a * b).abs() <= 1e-10);
    assert!((g.k_max - a / (b * b)).abs() <= 1e-6);
    assert!((g.k_min - b / (a * a)).abs() <= 1e-6);
    // The parametrization starts at (a, 0), the point of largest curvature.
    assert!((g.curvature(0.0) - a / (b * b)).abs() <= 1e-9);
    let q = g.point(0.25 * g.length);
    assert!(q[0].abs() <= 1e-9 && (q[1] - b).abs() <= 1e-9);
}

#[test]
fn frame_is_orthonormal_with_inward_normal() {
    let g = make_geometry(&CurveSpec::ellipse(1.5, 1.0)).unwrap();
    for j in 0..37 {
        let s = g.length * j as f64 / 37.0;
        let (t, n) = (g.tangent(s), g.normal(s));
        let (p0, t0, k0) = g.frame(s);
        assert_eq!((p0, t0, k0), (g.point(s), t, g.curvature(s)));
        assert!((t[0] * t[0] + t[1] * t[1] - 1.0).abs() <= 1e-12);
        assert!((t[0] * n[0] + t[1] * n[1]).abs() <= 1e-12);
        let p = g.point(s);
        // Inward: moving along the normal lowers the ellipse level set.
        let level = |x: f64, y: f64| (x / 1.5).powi(2) + y * y;
        assert!(level(p[0] + 1e-4 * n[0], p[1] + 1e-4 * n[1]) < 1.0);
    }
}

#[test]
fn total_curvature_is_two_pi() {
    let g = make_geometry(&CurveSpec::ellipse(2.0, 1.0)).unwrap();
    assert!((g.curvature_integral(0.0, g.length) - 2.0 * PI).abs() <= 1e-10);
    let dec = decompose_cells(&g, 97, CurvatureSampling::CellMean).unwrap();
    let total: f64 = dec.cells.iter().map(|c| c.k * (c.s_hi - c.s_lo)).sum();
    assert!((total - 2.0 * PI).abs() <= 1e-10);
}

#[test]
fn point_cloud_matches_fourier_curve() {
    let (a, b) = (2.0, 1.0);
    let data: Vec<[f64; 2]> = (0..64)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / 64.0;
            [a * th.cos(), b * th.sin()]
        })
        .collect();
    let g = make_geometry(&CurveSpec::Points { data, samples: 1024 }).unwrap();
    assert!((g.length - ellipse_perimeter(a, b)).abs() <= 1e-9);
    assert!((g.area - PI * a * b).abs() <= 1e-9);
}

#[test]
fn geometry_round_trips_through_json() {
    let spec = CurveSpec::ellipse(1.5, 1.0);
    let text = serde_json::to_string(&spec).unwrap();
    assert!(text.contains("\"type\":\"fourier\""));
    let back: CurveSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
}

#[test]
fn invalid_curves_are_rejected() {
    // Figure eight: turning number 0.
    let eight = CurveSpec::Fourier {
        data: vec![[1.0, 0.0, 0.0, 0.0, 1.0], [2.0, 0.0, 1.0, 0.0, 0.0]],
        samples: 512,
    };
    assert!(matches!(make_geometry(&eight), Err(Error::SelfIntersection { .. })));
    // Clockwise circle.
    let cw = CurveSpec::Fourier {
        data: vec![[1.0, 1.0, 0.0, 0.0, -1.0]],
        samples: 512,
    };
    assert!(matches!(make_geometry(&cw), Err(Error::SelfIntersection { .. })));
    let point = CurveSpec::Fourier {
        data: vec![[0.0, 1.0, 0.0, 1.0, 0.0]],
        samples: 512,
    };
    assert!(make_geometry(&point).is_err());
    let few = CurveSpec::Points {
        data: vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]],
        samples: 64,
    };
    assert!(matches!(make_geometry(&few), Err(Error::InvalidGeometry(_))));
    let half = CurveSpec::Fourier {
        data: vec![[1.5, 1.0, 0.0, 0.0, 1.0]],
        samples: 512,
    };
    assert!(matches!(make_geometry(&half), Err(Error::InvalidGeometry(_))));
}

#[test]
fn too_few_cells() {
    let g = make_geometry(&CurveSpec::circle(1.0)).unwrap();
    assert!(matches!(
        decompose_cells(&g, 4, CurvatureSampling::CellMean),
        Err(Error::TooFewCells { n: 4 })
    ));
}

#[test]
fn cells_tile_the_boundary() {
    let g = make_geometry(&CurveSpec::ellipse(1.5, 1.0)).unwrap();
    let p = g.params(1.4, 0.04).unwrap();
    let dec = decompose(&g, &p).unwrap();
    assert_eq!(dec.n_cells, (g.length / 0.04).round() as usize);
    assert_eq!(dec.cells[0].s_lo, 0.0);
    assert_eq!(dec.cells.last().unwrap().s_hi, g.length);
    for w in dec.cells.windows(2) {
        assert!((w[0].s_hi - w[1].s_lo).abs() <= 1e-12);
    }
    for (i, c) in dec.cells.iter().enumerate() {
        assert_eq!(dec.cell_of(0.5 * (c.s_lo + c.s_hi)), i);
    }
    assert_eq!(dec.cell_of(g.length + 0.5 * dec.ell_eps), 0);
    // Curvature jumps between neighbouring cells are O(eps).
    assert!(dec.max_jump() <= 2.0 * g.kprime_max * dec.ell_eps);
}

#[test]
fn gauge_offset_is_a_fractional_flux() {
    let g = make_geometry(&CurveSpec::ellipse(1.5, 1.0)).unwrap();
    for eps in [0.08, 0.04, 0.02] {
        let d = g.delta_eps(eps);
        assert!(d >= 0.0 && d < 2.0 * PI / g.length);
        let flux = g.area / (eps * eps) - d * g.length / (2.0 * PI) * 2.0 * PI;
        let turns = flux / (2.0 * PI);
        assert!((turns - turns.round()).abs() <= 1e-8);
    }
}

#[test]
fn circle_energy_is_length_times_one_cell() {
    let eps = 0.04;
    let g = make_geometry(&CurveSpec::circle(1.0)).unwrap();
    let p = g.params(1.4, eps).unwrap();
    let be = boundary_energy(&g, &p).unwrap();
    let grid = Grid1D::layer(&p, DEFAULT_GRID_NODES).unwrap();
    let e_star = optimal_phase(1.0, &p, &grid).unwrap().energy;
    let want = 2.0 * PI * e_star / eps;
    assert!((be.leading - want).abs() <= 1e-8 * want.abs(), "{} vs {want}", be.leading);
    assert!(be.riemann_error <= 1e-8 * want.abs());
    assert!(be.cells.iter().all(|c| (c.k_n - 1.0).abs() <= 1e-12));
}

#[test]
fn riemann_sum_converges_under_refinement() {
    let g = make_geometry(&CurveSpec::ellipse(1.5, 1.0)).unwrap();
    let p = g.params(1.4, 0.08).unwrap();
    let n = (g.length / 0.08).round() as usize;
    let coarse = riemann_energy(&g, &p, n, 512, CurvatureSampling::CellMean).unwrap();
    let fine = riemann_energy(&g, &p, 4 * n, 512, CurvatureSampling::CellMean).unwrap();
    assert!((coarse - fine).abs() <= 1e-4 * fine.abs(), "{coarse} vs {fine}");
    let mid = riemann_energy(&g, &p, n, 512, CurvatureSampling::Midpoint).unwrap();
    assert!((mid - fine).abs() <= 1e-3 * fine.abs());
}
