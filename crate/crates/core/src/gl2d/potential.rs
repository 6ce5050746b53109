//! The frozen field `F = grad^perp phi` with `Delta phi = 1` in the domain and
//! `phi` constant on the boundary, so `div F = 0`, `curl F = 1`, `F . nu = 0`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryGeometry;
use crate::error::{Error, Result};

pub trait VectorField: Sync {
    fn value(&self, p: [f64; 2]) -> [f64; 2];

    /// `int A . dl` along the segment from `a` to `b`.
    fn line_integral(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        // Four Gauss points: exact for fields polynomial of degree <= 7.
        const X: [f64; 4] = [
            -0.861_136_311_594_052_6,
            -0.339_981_043_584_856_3,
            0.339_981_043_584_856_3,
            0.861_136_311_594_052_6,
        ];
        const W: [f64; 4] = [
            0.347_854_845_137_453_9,
            0.652_145_154_862_546_1,
            0.652_145_154_862_546_1,
            0.347_854_845_137_453_9,
        ];
        let d = [b[0] - a[0], b[1] - a[1]];
        let mut acc = 0.0;
        for (x, w) in X.iter().zip(&W) {
            let u = 0.5 * (1.0 + x);
            let v = self.value([a[0] + u * d[0], a[1] + u * d[1]]);
            acc += w * (v[0] * d[0] + v[1] * d[1]);
        }
        0.5 * acc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FrozenField {
    /// `A = (-(y - cy), x - cx)/2`, exact for discs centred at `c`.
    Symmetric { center: [f64; 2] },
    /// `A = (-(y - cy), x - cx)/2 + grad^perp h`, `h = Re sum_m a_m ((z - c)/rho)^m`.
    Harmonic {
        center: [f64; 2],
        rho: f64,
        coeffs: Vec<[f64; 2]>,
    },
    /// No field at all; useful for synthetic states.
    Zero,
}

impl VectorField for FrozenField {
    fn value(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            FrozenField::Symmetric { center } => [-0.5 * (p[1] - center[1]), 0.5 * (p[0] - center[0])],
            FrozenField::Harmonic { center, rho, coeffs } => {
                let (wx, wy) = ((p[0] - center[0]) / rho, (p[1] - center[1]) / rho);
                // P = h'(z) = sum m a_m w^{m-1} / rho, by Horner from the top mode.
                let (mut pr, mut pi) = (0.0, 0.0);
                for (i, a) in coeffs.iter().enumerate().rev() {
                    let m = (i + 1) as f64;
                    let (nr, ni) = (pr * wx - pi * wy, pr * wy + pi * wx);
                    pr = nr + m * a[0];
                    pi = ni + m * a[1];
                }
                pr /= rho;
                pi /= rho;
                [-0.5 * (p[1] - center[1]) + pi, 0.5 * (p[0] - center[0]) + pr]
            }
            FrozenField::Zero => [0.0, 0.0],
        }
    }
}

/// Number of harmonic modes in the boundary fit.
pub const HARMONIC_MODES: usize = 40;

/// Builds `F` for the domain bounded by `geom`: closed form for discs, otherwise
/// a least-squares harmonic-polynomial fit of the boundary condition.
pub fn vector_potential(geom: &BoundaryGeometry) -> Result<FrozenField> {
    let n_fit = 8 * HARMONIC_MODES;
    let pts: Vec<[f64; 2]> = (0..n_fit)
        .map(|j| geom.point(geom.length * j as f64 / n_fit as f64))
        .collect();
    let center = centroid(geom);
    if (geom.k_max - geom.k_min).abs() < 1e-9 * geom.k_max.abs().max(1.0) {
        return Ok(FrozenField::Symmetric { center });
    }
    let rho = pts
        .iter()
        .map(|p| (p[0] - center[0]).hypot(p[1] - center[1]))
        .fold(0.0, f64::max);
    // phi = |r - c|^2/4 + h must be constant on the boundary:
    // c0 + sum (ar Re w^m - ai Im w^m) = -|r - c|^2 / 4.
    let cols = 1 + 2 * HARMONIC_MODES;
    let mut a = DMatrix::<f64>::zeros(n_fit, cols);
    let mut rhs = DVector::<f64>::zeros(n_fit);
    for (row, p) in pts.iter().enumerate() {
        let (wx, wy) = ((p[0] - center[0]) / rho, (p[1] - center[1]) / rho);
        a[(row, 0)] = 1.0;
        let (mut zr, mut zi) = (1.0, 0.0);
        for m in 0..HARMONIC_MODES {
            let (nr, ni) = (zr * wx - zi * wy, zr * wy + zi * wx);
            zr = nr;
            zi = ni;
            a[(row, 1 + 2 * m)] = zr;
            a[(row, 2 + 2 * m)] = -zi;
        }
        rhs[row] = -0.25 * ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2));
    }
    let svd = a.svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-13)
        .map_err(|e| Error::LinearSolve(e.to_string()))?;
    let coeffs = (0..HARMONIC_MODES)
        .map(|m| [sol[1 + 2 * m], sol[2 + 2 * m]])
        .collect();
    Ok(FrozenField::Harmonic { center, rho, coeffs })
}

fn centroid(geom: &BoundaryGeometry) -> [f64; 2] {
    // Area centroid by Green's theorem on a fine polygon.
    let n = 4096;
    let pts: Vec<[f64; 2]> = (0..n).map(|j| geom.point(geom.length * j as f64 / n as f64)).collect();
    let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        let cr = p[0] * q[1] - q[0] * p[1];
        a2 += cr;
        cx += (p[0] + q[0]) * cr;
        cy += (p[1] + q[1]) * cr;
    }
    [cx / (3.0 * a2), cy / (3.0 * a2)]
}
