//! Small scalar and banded-matrix routines shared by the solvers.

use crate::error::{Error, Result};

/// Solves a tridiagonal system with the Thomas algorithm.
/// `lower[i]` couples row `i + 1` to column `i`, `upper[i]` row `i` to column `i + 1`.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    debug_assert!(lower.len() + 1 == n && upper.len() + 1 == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut piv = diag[0];
    if piv == 0.0 || !piv.is_finite() {
        return Err(Error::LinearSolve("zero pivot in tridiagonal solve".into()));
    }
    x[0] = rhs[0] / piv;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / piv;
        piv = diag[i] - lower[i - 1] * c[i - 1];
        if piv == 0.0 || !piv.is_finite() {
            return Err(Error::LinearSolve("zero pivot in tridiagonal solve".into()));
        }
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy)]
pub struct ScalarMin {
    pub x: f64,
    pub fx: f64,
    pub evaluations: usize,
}

/// Brent's parabolic-interpolation minimizer on `[a, b]`.
pub fn brent_minimize<F>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<ScalarMin>
where
    F: FnMut(f64) -> Result<f64>,
{
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut evaluations = 1;

    for _ in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(ScalarMin { x, fx, evaluations });
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        evaluations += 1;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::NonConvergence {
        what: "Brent minimization",
        iterations: max_iter,
        residual: b - a,
        trace: Vec::new(),
    })
}

/// Brent's root finder; `f(a)` and `f(b)` must have opposite signs.
pub fn brent_root<F>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidParameter(format!(
            "root not bracketed: f({a}) = {fa:.3e}, f({b}) = {fb:.3e}"
        )));
    }
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Err(Error::NonConvergence {
        what: "Brent root finding",
        iterations: max_iter,
        residual: fb.abs(),
        trace: Vec::new(),
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let z_old = z;
            z = z_old - p0 / dp;
            if (z - z_old).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Integrates `f` over `[a, b]` with a fixed Gauss-Legendre rule.
pub fn integrate_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Quintic smoothstep `6x^5 - 15x^4 + 10x^3` clamped to `[0, 1]`.
#[inline]
pub fn smoothstep5(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

#[inline]
pub fn smoothstep5_deriv(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    30.0 * x * x * (x - 1.0) * (x - 1.0)
}

/// Trapezoid weights for a uniform grid.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Cumulative trapezoid integral starting at zero.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Second-order finite-difference derivative (one-sided at the ends).
pub fn derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    d
}

/// Linear interpolation on a uniform grid starting at 0; clamps outside.
pub fn interp_uniform(values: &[f64], h: f64, t: f64) -> f64 {
    let n = values.len();
    if t <= 0.0 {
        return values[0];
    }
    let x = t / h;
    let i = x.floor() as usize;
    if i + 1 >= n {
        return values[n - 1];
    }
    let lam = x - i as f64;
    (1.0 - lam) * values[i] + lam * values[i + 1]
}

/// Real roots of `a x^3 + b x^2 + c x + d` (a != 0).
pub fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    if a.abs() < 1e-300 {
        if b.abs() < 1e-300 {
            return if c.abs() < 1e-300 { vec![] } else { vec![-d / c] };
        }
        let disc = c * c - 4.0 * b * d;
        if disc < 0.0 {
            return vec![];
        }
        let s = disc.sqrt();
        let q = -0.5 * (c + s.copysign(c));
        let mut r = vec![q / b];
        if q != 0.0 {
            r.push(d / q);
        }
        return r;
    }
    let (b, c, d) = (b / a, c / a, d / a);
    let q = (b * b - 3.0 * c) / 9.0;
    let r = (2.0 * b * b * b - 9.0 * b * c + 27.0 * d) / 54.0;
    let mut roots = if r * r < q * q * q {
        let theta = (r / (q * q * q).sqrt()).clamp(-1.0, 1.0).acos();
        let sq = -2.0 * q.sqrt();
        vec![
            sq * (theta / 3.0).cos() - b / 3.0,
            sq * ((theta + 2.0 * std::f64::consts::PI) / 3.0).cos() - b / 3.0,
            sq * ((theta - 2.0 * std::f64::consts::PI) / 3.0).cos() - b / 3.0,
        ]
    } else {
        let aa = -(r.abs() + (r * r - q * q * q).sqrt()).cbrt().copysign(r);
        let bb = if aa != 0.0 { q / aa } else { 0.0 };
        vec![aa + bb - b / 3.0]
    };
    // One Newton polish per root.
    for x in roots.iter_mut() {
        let p = ((*x + b) * *x + c) * *x + d;
        let dp = (3.0 * *x + 2.0 * b) * *x + c;
        if dp != 0.0 {
            *x -= p / dp;
        }
    }
    roots
}

/// Wraps an angle to `(-pi, pi]`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    let y = x - (2.0 * PI) * ((x + PI) / (2.0 * PI)).floor();
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}
