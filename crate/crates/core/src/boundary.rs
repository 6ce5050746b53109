//! Smooth closed boundaries, arc-length parametrization, cell decomposition and
//! the curvature-integrated boundary energy `(1/eps) sum_n l_eps E*(k_n)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;
use crate::params::{default_layer_width, Grid1D, ProblemParams, DEFAULT_GRID_NODES};
use crate::profile1d::{optimal_phase, optimal_phase_near, OptimalPair};

/// Curve description as read from geometry JSON.
///
/// Fourier rows are `[m, ax, bx, ay, by]`, meaning
/// `x += ax cos(m xi) + bx sin(m xi)`, `y += ay cos(m xi) + by sin(m xi)`.
/// Point clouds are counterclockwise samples, roughly equispaced in parameter;
/// they are turned into their trigonometric interpolant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CurveSpec {
    Fourier { data: Vec<[f64; 5]>, samples: usize },
    Points { data: Vec<[f64; 2]>, samples: usize },
}

impl CurveSpec {
    pub fn circle(radius: f64) -> Self {
        CurveSpec::Fourier {
            data: vec![[1.0, radius, 0.0, 0.0, radius]],
            samples: 1024,
        }
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        CurveSpec::Fourier {
            data: vec![[1.0, a, 0.0, 0.0, b]],
            samples: 1024,
        }
    }

    fn samples(&self) -> usize {
        match self {
            CurveSpec::Fourier { samples, .. } | CurveSpec::Points { samples, .. } => *samples,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Mode {
    m: f64,
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
}

/// `(position, d/dxi, d2/dxi2, d3/dxi3)` of the raw parametrization.
type Jet = [[f64; 2]; 4];

#[derive(Debug, Clone)]
pub struct BoundaryGeometry {
    spec: CurveSpec,
    modes: Vec<Mode>,
    panel_s: Vec<f64>,
    dxi: f64,
    rule: (Vec<f64>, Vec<f64>),
    pub length: f64,
    pub area: f64,
    pub k_max: f64,
    pub k_min: f64,
    pub kprime_max: f64,
}

fn fourier_from_points(points: &[[f64; 2]]) -> Result<Vec<Mode>> {
    let n = points.len();
    if n < 8 {
        return Err(Error::InvalidGeometry(format!("need at least 8 points, got {n}")));
    }
    let m_max = (n - 1) / 2;
    let mut modes = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let (mut ax, mut bx, mut ay, mut by) = (0.0, 0.0, 0.0, 0.0);
        for (j, p) in points.iter().enumerate() {
            let th = 2.0 * PI * (m * j % n) as f64 / n as f64;
            let (s, c) = th.sin_cos();
            ax += p[0] * c;
            bx += p[0] * s;
            ay += p[1] * c;
            by += p[1] * s;
        }
        let scale = if m == 0 { 1.0 / n as f64 } else { 2.0 / n as f64 };
        modes.push(Mode {
            m: m as f64,
            ax: ax * scale,
            bx: bx * scale,
            ay: ay * scale,
            by: by * scale,
        });
    }
    Ok(modes)
}

fn segments_cross(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

pub fn make_geometry(spec: &CurveSpec) -> Result<BoundaryGeometry> {
    let modes = match spec {
        CurveSpec::Fourier { data, .. } => {
            if data.is_empty() {
                return Err(Error::InvalidGeometry("no Fourier modes".into()));
            }
            data.iter()
                .map(|r| {
                    if r[0] < 0.0 || r[0].fract() != 0.0 {
                        Err(Error::InvalidGeometry(format!("mode index {} is not a natural number", r[0])))
                    } else {
                        Ok(Mode {
                            m: r[0],
                            ax: r[1],
                            bx: r[2],
                            ay: r[3],
                            by: r[4],
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?
        }
        CurveSpec::Points { data, .. } => fourier_from_points(data)?,
    };
    let samples = spec.samples().max(64);
    let n_panels = samples.max(512);
    let dxi = 2.0 * PI / n_panels as f64;
    let mut geom = BoundaryGeometry {
        spec: spec.clone(),
        modes,
        panel_s: Vec::new(),
        dxi,
        rule: gauss_legendre(12),
        length: 0.0,
        area: 0.0,
        k_max: 0.0,
        k_min: 0.0,
        kprime_max: 0.0,
    };

    // Speed check and arc-length table.
    let mut speed_min = f64::INFINITY;
    let mut speed_sum = 0.0;
    let fine = 4 * n_panels;
    for j in 0..fine {
        let xi = 2.0 * PI * j as f64 / fine as f64;
        let sp = geom.speed(xi);
        speed_min = speed_min.min(sp);
        speed_sum += sp;
        if sp < 1e-10 * (speed_sum / (j + 1) as f64) || sp == 0.0 {
            return Err(Error::ZeroSpeed { xi });
        }
    }
    let mut panel_s = Vec::with_capacity(n_panels + 1);
    let mut acc = 0.0;
    panel_s.push(0.0);
    for j in 0..n_panels {
        let a = j as f64 * dxi;
        acc += geom.speed_integral(a, a + dxi);
        panel_s.push(acc);
    }
    geom.length = acc;
    geom.panel_s = panel_s;

    // Area, turning number, curvature bounds.
    let (mut area, mut turning) = (0.0, 0.0);
    let (mut kmax, mut kmin, mut kpmax) = (f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
    let (x, w) = gauss_legendre(12);
    for j in 0..n_panels {
        let a = j as f64 * dxi;
        for (xq, wq) in x.iter().zip(&w) {
            let xi = a + 0.5 * dxi * (1.0 + xq);
            let jet = geom.jet(xi);
            let [p, d1, d2, _] = jet;
            area += 0.5 * wq * 0.5 * dxi * (p[0] * d1[1] - p[1] * d1[0]);
            let sp2 = d1[0] * d1[0] + d1[1] * d1[1];
            turning += wq * 0.5 * dxi * (d1[0] * d2[1] - d1[1] * d2[0]) / sp2;
            let (k, kp) = curvature_from_jet(&jet);
            kmax = kmax.max(k);
            kmin = kmin.min(k);
            kpmax = kpmax.max(kp.abs());
        }
    }
    let turning = turning / (2.0 * PI);
    if (turning - 1.0).abs() > 1e-6 {
        return Err(Error::SelfIntersection { turning });
    }
    let poly: Vec<[f64; 2]> = (0..samples)
        .map(|j| geom.jet(2.0 * PI * j as f64 / samples as f64)[0])
        .collect();
    for i in 0..samples {
        let (p1, p2) = (poly[i], poly[(i + 1) % samples]);
        for j in i + 2..samples {
            if i == 0 && j == samples - 1 {
                continue;
            }
            if segments_cross(p1, p2, poly[j], poly[(j + 1) % samples]) {
                return Err(Error::SelfIntersection { turning });
            }
        }
    }
    geom.area = area;
    geom.k_max = kmax;
    geom.k_min = kmin;
    geom.kprime_max = kpmax;
    Ok(geom)
}

/// Signed curvature and its arc-length derivative.
fn curvature_from_jet(jet: &Jet) -> (f64, f64) {
    let [_, d1, d2, d3] = *jet;
    let sp2 = d1[0] * d1[0] + d1[1] * d1[1];
    let sp = sp2.sqrt();
    let cross = d1[0] * d2[1] - d1[1] * d2[0];
    let k = cross / (sp2 * sp);
    let dcross = d1[0] * d3[1] - d1[1] * d3[0];
    let dot = d1[0] * d2[0] + d1[1] * d2[1];
    let dk_dxi = (dcross * sp2 - 3.0 * cross * dot) / (sp2 * sp2 * sp);
    (k, dk_dxi / sp)
}

impl BoundaryGeometry {
    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    fn jet(&self, xi: f64) -> Jet {
        let mut out = [[0.0; 2]; 4];
        for md in &self.modes {
            let (s, c) = (md.m * xi).sin_cos();
            let m = md.m;
            // d^j/dxi^j of (cos, sin) cycles through (cos, sin), (-sin, cos), (-cos, -sin), (sin, -cos).
            let cs = [(c, s), (-s, c), (-c, -s), (s, -c)];
            let mut mp = 1.0;
            for (j, (cj, sj)) in cs.iter().enumerate() {
                if j > 0 {
                    mp *= m;
                }
                out[j][0] += mp * (md.ax * cj + md.bx * sj);
                out[j][1] += mp * (md.ay * cj + md.by * sj);
            }
        }
        out
    }

    fn speed(&self, xi: f64) -> f64 {
        let d = self.jet(xi)[1];
        d[0].hypot(d[1])
    }

    fn speed_integral(&self, a: f64, b: f64) -> f64 {
        crate::numerics::integrate_gl(|x| self.speed(x), a, b, &self.rule)
    }

    fn s_of_xi(&self, xi: f64) -> f64 {
        let j = ((xi / self.dxi).floor() as usize).min(self.panel_s.len() - 2);
        let a = j as f64 * self.dxi;
        self.panel_s[j] + self.speed_integral(a, xi)
    }

    /// Raw parameter of arc length `s` (taken modulo the length).
    pub fn xi_of_s(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        let j = match self.panel_s.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(j) => return j as f64 * self.dxi,
            Err(j) => j - 1,
        };
        let (s0, s1) = (self.panel_s[j], self.panel_s[j + 1]);
        let mut xi = (j as f64 + (s - s0) / (s1 - s0)) * self.dxi;
        for _ in 0..30 {
            let step = (self.s_of_xi(xi) - s) / self.speed(xi);
            xi -= step;
            if step.abs() < 1e-15 * (1.0 + xi.abs()) {
                break;
            }
        }
        xi
    }

    pub fn point(&self, s: f64) -> [f64; 2] {
        self.jet(self.xi_of_s(s))[0]
    }

    /// Unit tangent (counterclockwise).
    pub fn tangent(&self, s: f64) -> [f64; 2] {
        let d = self.jet(self.xi_of_s(s))[1];
        let sp = d[0].hypot(d[1]);
        [d[0] / sp, d[1] / sp]
    }

    /// Unit inward normal, the tangent rotated by +90 degrees.
    pub fn normal(&self, s: f64) -> [f64; 2] {
        let t = self.tangent(s);
        [-t[1], t[0]]
    }

    pub fn curvature(&self, s: f64) -> f64 {
        curvature_from_jet(&self.jet(self.xi_of_s(s))).0
    }

    pub fn curvature_deriv(&self, s: f64) -> f64 {
        curvature_from_jet(&self.jet(self.xi_of_s(s))).1
    }

    /// `(point, unit tangent, curvature)` at arc length `s`.
    pub fn frame(&self, s: f64) -> ([f64; 2], [f64; 2], f64) {
        let jet = self.jet(self.xi_of_s(s));
        let d = jet[1];
        let sp = d[0].hypot(d[1]);
        (jet[0], [d[0] / sp, d[1] / sp], curvature_from_jet(&jet).0)
    }

    /// `int_{s0}^{s1} k ds`, adaptively in the raw parameter.
    pub fn curvature_integral(&self, s0: f64, s1: f64) -> f64 {
        let x0 = self.xi_of_s(s0);
        let mut x1 = self.xi_of_s(s1);
        if x1 <= x0 {
            x1 += 2.0 * PI;
        }
        let g = |xi: f64| {
            let j = self.jet(xi);
            let [_, d1, d2, _] = j;
            (d1[0] * d2[1] - d1[1] * d2[0]) / (d1[0] * d1[0] + d1[1] * d1[1])
        };
        adaptive_gl(&g, x0, x1, &self.rule, 1e-14, 30)
    }

    /// Fractional gauge offset `(2 pi/|boundary|) frac(|Omega| / (2 pi eps^2))`.
    pub fn delta_eps(&self, eps: f64) -> f64 {
        let flux = self.area / (2.0 * PI * eps * eps);
        2.0 * PI / self.length * (flux - flux.floor())
    }

    /// Parameters with the default layer width for this curve's curvature range
    /// and the geometry's gauge offset.
    pub fn params(&self, b: f64, eps: f64) -> Result<ProblemParams> {
        let k_max = self.k_max.abs().max(self.k_min.abs());
        let t = default_layer_width(eps, k_max);
        ProblemParams::new(b, eps, t / eps.ln().abs())?.with_delta(self.delta_eps(eps))
    }
}

fn adaptive_gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>), tol: f64, depth: usize) -> f64 {
    let whole = crate::numerics::integrate_gl(f, a, b, rule);
    let m = 0.5 * (a + b);
    let left = crate::numerics::integrate_gl(f, a, m, rule);
    let right = crate::numerics::integrate_gl(f, m, b, rule);
    if depth == 0 || (left + right - whole).abs() <= tol * (1.0 + whole.abs()) {
        left + right
    } else {
        adaptive_gl(f, a, m, rule, tol, depth - 1) + adaptive_gl(f, m, b, rule, tol, depth - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureSampling {
    #[default]
    CellMean,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub s_lo: f64,
    pub s_hi: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDecomposition {
    pub cells: Vec<Cell>,
    pub ell_eps: f64,
    pub n_cells: usize,
    pub sampling: CurvatureSampling,
}

impl CellDecomposition {
    /// Index of the cell containing `s` (periodic).
    pub fn cell_of(&self, s: f64) -> usize {
        let len = self.ell_eps * self.n_cells as f64;
        let s = s.rem_euclid(len);
        ((s / self.ell_eps).floor() as usize).min(self.n_cells - 1)
    }

    pub fn max_jump(&self) -> f64 {
        let n = self.n_cells;
        (0..n)
            .map(|i| (self.cells[i].k - self.cells[(i + 1) % n].k).abs())
            .fold(0.0, f64::max)
    }
}

pub fn decompose(geom: &BoundaryGeometry, params: &ProblemParams) -> Result<CellDecomposition> {
    let n = (geom.length / params.eps).round() as usize;
    decompose_cells(geom, n, CurvatureSampling::CellMean)
}

pub fn decompose_cells(geom: &BoundaryGeometry, n: usize, sampling: CurvatureSampling) -> Result<CellDecomposition> {
    if n < 8 {
        return Err(Error::TooFewCells { n });
    }
    let ell = geom.length / n as f64;
    let cells = (0..n)
        .map(|i| {
            let s_lo = i as f64 * ell;
            let s_hi = if i + 1 == n { geom.length } else { (i + 1) as f64 * ell };
            let k = match sampling {
                CurvatureSampling::CellMean => geom.curvature_integral(s_lo, s_hi) / ell,
                CurvatureSampling::Midpoint => geom.curvature(0.5 * (s_lo + s_hi)),
            };
            Cell { s_lo, s_hi, k }
        })
        .collect();
    Ok(CellDecomposition {
        cells,
        ell_eps: ell,
        n_cells: n,
        sampling,
    })
}

/// Optimal pairs for many curvatures, reusing solutions along a chain ordered
/// by curvature. Identical curvature values share one solve.
pub fn solve_curvatures(ks: &[f64], params: &ProblemParams, grid: &Grid1D) -> Result<Vec<OptimalPair>> {
    let mut unique: BTreeMap<u64, usize> = BTreeMap::new();
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by(|&a, &b| ks[a].total_cmp(&ks[b]));
    let mut solved: Vec<Option<OptimalPair>> = vec![None; ks.len()];
    let mut prev: Option<OptimalPair> = None;
    for &i in &order {
        let key = ks[i].to_bits();
        if let Some(&j) = unique.get(&key) {
            solved[i] = solved[j].clone();
            continue;
        }
        let pair = match &prev {
            Some(p) => optimal_phase_near(ks[i], params, grid, p),
            None => optimal_phase(ks[i], params, grid),
        }
        .map_err(|e| e.in_cell(i))?;
        unique.insert(key, i);
        prev = Some(pair.clone());
        solved[i] = Some(pair);
    }
    Ok(solved.into_iter().map(|p| p.expect("every cell solved")).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEnergy {
    pub n: usize,
    pub s_lo: f64,
    pub s_hi: f64,
    pub k_n: f64,
    pub alpha_n: f64,
    #[serde(rename = "E1D")]
    pub e1d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEnergy {
    /// `(1/eps) sum_n l_eps E*(k_n)`.
    pub leading: f64,
    /// The same sum with twice as many cells.
    pub riemann_refined: f64,
    pub riemann_error: f64,
    pub cells: Vec<CellEnergy>,
}

fn riemann_sum(dec: &CellDecomposition, pairs: &[OptimalPair], eps: f64) -> f64 {
    pairs.iter().map(|p| dec.ell_eps * p.energy).sum::<f64>() / eps
}

pub fn boundary_energy(geom: &BoundaryGeometry, params: &ProblemParams) -> Result<BoundaryEnergy> {
    boundary_energy_with(geom, params, DEFAULT_GRID_NODES, CurvatureSampling::CellMean)
}

/// `(1/eps) sum l E*(k_n)` for an explicit cell count.
pub fn riemann_energy(
    geom: &BoundaryGeometry,
    params: &ProblemParams,
    n_cells: usize,
    grid_nodes: usize,
    sampling: CurvatureSampling,
) -> Result<f64> {
    let dec = decompose_cells(geom, n_cells, sampling)?;
    let grid = Grid1D::layer(params, grid_nodes)?;
    let ks: Vec<f64> = dec.cells.iter().map(|c| c.k).collect();
    let pairs = solve_curvatures(&ks, params, &grid)?;
    Ok(riemann_sum(&dec, &pairs, params.eps))
}

pub fn boundary_energy_with(
    geom: &BoundaryGeometry,
    params: &ProblemParams,
    grid_nodes: usize,
    sampling: CurvatureSampling,
) -> Result<BoundaryEnergy> {
    let n = (geom.length / params.eps).round() as usize;
    let dec = decompose_cells(geom, n, sampling)?;
    let grid = Grid1D::layer(params, grid_nodes)?;
    let ks: Vec<f64> = dec.cells.iter().map(|c| c.k).collect();
    let pairs = solve_curvatures(&ks, params, &grid)?;
    let leading = riemann_sum(&dec, &pairs, params.eps);
    let riemann_refined = riemann_energy(geom, params, 2 * n, grid_nodes, sampling)?;
    let cells = dec
        .cells
        .iter()
        .zip(&pairs)
        .enumerate()
        .map(|(i, (c, p))| CellEnergy {
            n: i,
            s_lo: c.s_lo,
            s_hi: c.s_hi,
            k_n: c.k,
            alpha_n: p.alpha_star,
            e1d: p.energy,
        })
        .collect();
    Ok(BoundaryEnergy {
        leading,
        riemann_refined,
        riemann_error: (riemann_refined - leading).abs(),
        cells,
    })
}

/// Piecewise-in-s reference density `g_ref(s, t) = f_n(t)` on cell `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceProfile {
    pub cells: CellDecomposition,
    pub pairs: Vec<OptimalPair>,
    pub params: ProblemParams,
}

impl ReferenceProfile {
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        if !(0.0..=self.params.t_eps).contains(&t) {
            return 0.0;
        }
        self.pairs[self.cells.cell_of(s)].profile.eval(t)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.pairs[0].profile.grid
    }

    /// Largest interface jump `sup_t |f_n(t) - f_{n+1}(t)|`, with the curvature jump.
    pub fn interface_jumps(&self) -> Vec<(f64, f64)> {
        let n = self.pairs.len();
        (0..n)
            .map(|i| {
                let a = &self.pairs[i].profile.values;
                let b = &self.pairs[(i + 1) % n].profile.values;
                let jump = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                let dk = (self.cells.cells[i].k - self.cells.cells[(i + 1) % n].k).abs();
                (jump, dk)
            })
            .collect()
    }
}

pub fn reference_profile(geom: &BoundaryGeometry, params: &ProblemParams) -> Result<ReferenceProfile> {
    reference_profile_with(geom, params, DEFAULT_GRID_NODES)
}

pub fn reference_profile_with(
    geom: &BoundaryGeometry,
    params: &ProblemParams,
    grid_nodes: usize,
) -> Result<ReferenceProfile> {
    let cells = decompose(geom, params)?;
    let grid = Grid1D::layer(params, grid_nodes)?;
    let ks: Vec<f64> = cells.cells.iter().map(|c| c.k).collect();
    let pairs = solve_curvatures(&ks, params, &grid)?;
    Ok(ReferenceProfile {
        cells,
        pairs,
        params: *params,
    })
}
