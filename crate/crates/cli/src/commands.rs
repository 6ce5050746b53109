//! Subcommand implementations. Each returns a deterministic [`Report`] and, when
//! given an output directory, writes its JSON/CSV artifacts there.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use surfgl_core::boundary::{boundary_energy_with, make_geometry, riemann_energy, CurvatureSampling};
use surfgl_core::io::{cells_csv, field_csv, profile_csv, trial_csv, FieldManifest, OptimalPairRecord, TrialManifest};
use surfgl_core::params::{Grid1D, ProblemParams};
use surfgl_core::profile1d::optimal_phase;
use surfgl_core::spectral::{half_line_eigenvalue, theta0, TRUNCATION};
use surfgl_core::trial::build_trial_with;
use surfgl_core::profile1d::THETA0_REFERENCE as THETA0;
use surfgl_core::Error;

use crate::case::{solve_case, CaseSummary};
use crate::checks::{min_cost, strictly_decreasing, ProfileChecks};
use crate::config::{geometry_hash, RunConfig};
use crate::error::CliError;
use crate::report::{criteria as C, Record, Report, Timings};

fn write(out: Option<&Path>, name: &str, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = out {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, contents)?;
    }
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn tag(b: f64, k: Option<f64>, eps: f64) -> String {
    match k {
        Some(k) => format!("b{b}_k{k}_eps{eps}"),
        None => format!("b{b}_eps{eps}"),
    }
}

fn cases_1d(cfg: &RunConfig) -> Vec<(f64, f64, f64)> {
    let mut cases = Vec::new();
    for &b in &cfg.b {
        for &k in &cfg.k {
            for &eps in &cfg.eps {
                cases.push((b, k, eps));
            }
        }
    }
    cases
}

pub fn run_theta0(cfg: &RunConfig, out: Option<&Path>, timings: &mut Timings) -> Result<Report, CliError> {
    let hash = cfg.hash();
    let start = Instant::now();
    let n = cfg.theta0_resolution;
    let mut rec = Record::new("theta0", &[C::THETA0], &hash).input("resolution", n).input("truncation", TRUNCATION);
    match theta0(n, (-2.0, 0.0)).and_then(|t| Ok((t, half_line_eigenvalue(0.0, n, TRUNCATION)?))) {
        Ok((t, mu0)) => {
            rec.output("theta0", t.theta0);
            rec.output("alpha", t.alpha);
            rec.output("mu0", mu0);
            rec.residual("theta0_vs_reference", (t.theta0 - THETA0).abs());
            rec.residual("mu0_minus_one", (mu0 - 1.0).abs());
            rec.check("theta0", (t.theta0 - THETA0).abs() <= cfg.tolerances.theta0);
            rec.check("mu0", (mu0 - 1.0).abs() <= cfg.tolerances.mu0);
        }
        Err(e) => rec.fail(&e.into()),
    }
    timings.0.insert("theta0".into(), start.elapsed().as_secs_f64());
    let report = Report::new("theta0", &hash, vec![rec]);
    write(out, "theta0.json", &json(&report.records[0].outputs))?;
    Ok(report)
}

pub fn run_profile1d(cfg: &RunConfig, out: Option<&Path>, timings: &mut Timings) -> Result<Report, CliError> {
    if cfg.k.is_empty() {
        return Err(CliError::Usage("empty k list".into()));
    }
    let hash = cfg.hash();
    let results: Vec<_> = cases_1d(cfg)
        .into_par_iter()
        .map(|(b, k, eps)| {
            let start = Instant::now();
            let res = ProblemParams::with_default_width(b, eps, k.abs())
                .and_then(|p| Ok((Grid1D::layer(&p, cfg.grid_nodes)?, p)))
                .and_then(|(g, p)| optimal_phase(k, &p, &g));
            (b, k, eps, res, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut records = Vec::new();
    for (b, k, eps, res, secs) in results {
        let id = tag(b, Some(k), eps);
        timings.0.insert(id.clone(), secs);
        let mut rec = Record::new(&id, &[C::SOLVER_1D], &hash).input("b", b).input("k", k).input("eps", eps);
        match res {
            Ok(pair) => {
                let checks = ProfileChecks::of(&pair);
                rec.output("alpha", pair.alpha_star);
                rec.output("energy", pair.energy);
                rec.output("t_eps", pair.profile.params.t_eps);
                rec.residual("el_residual", checks.el_residual);
                rec.residual("energy_identity", checks.energy_identity);
                rec.residual("stationarity", checks.stationarity);
                rec.residual("sup", checks.sup);
                rec.residual("monotone_violation", checks.monotone_violation);
                for (name, ok) in checks.flags(&cfg.tolerances) {
                    rec.check(name, ok);
                }
                write(out, &format!("profile1d/{id}.json"), &json(&OptimalPairRecord::from(&pair)))?;
                write(out, &format!("profile1d/{id}.csv"), &profile_csv(&pair.profile))?;
            }
            Err(e) => rec.fail(&e.into()),
        }
        records.push(rec);
    }
    Ok(Report::new("profile1d", &hash, records))
}

pub fn run_costcheck(cfg: &RunConfig, out: Option<&Path>, timings: &mut Timings) -> Result<Report, CliError> {
    if cfg.k.is_empty() {
        return Err(CliError::Usage("empty k list".into()));
    }
    // A margin outside the admissible range is a usage error, caught before any solve.
    if let Some(d) = cfg.d_eps {
        for &eps in &cfg.eps {
            let max = eps.ln().abs().powi(-4);
            if !(d >= 0.0 && d <= max) {
                return Err(CliError::Core(Error::MarginOutOfRange { d_eps: d, max }));
            }
        }
    }
    let hash = cfg.hash();
    let results: Vec<_> = cases_1d(cfg)
        .into_par_iter()
        .map(|(b, k, eps)| {
            let start = Instant::now();
            let res = ProblemParams::with_default_width(b, eps, k.abs())
                .and_then(|p| Ok((Grid1D::layer(&p, cfg.grid_nodes)?, p)))
                .and_then(|(g, p)| {
                    let pair = optimal_phase(k, &p, &g)?;
                    let d = cfg.d_eps.unwrap_or(p.d_eps);
                    Ok((d, min_cost(&pair, d)?))
                });
            (b, k, eps, res, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut table = String::from("b,k,eps,minK,t_bar,pass\n");
    let mut records = Vec::new();
    for (b, k, eps, res, secs) in results {
        let id = tag(b, Some(k), eps);
        timings.0.insert(id.clone(), secs);
        let mut rec = Record::new(&id, &[C::COST], &hash).input("b", b).input("k", k).input("eps", eps);
        match res {
            Ok((d, (mk, t_bar))) => {
                let pass = mk >= cfg.tolerances.min_cost;
                rec.output("d_eps", d);
                rec.output("min_K", mk);
                rec.output("t_bar", t_bar);
                rec.check("min_K", pass);
                let _ = writeln!(table, "{b},{k},{eps},{mk:.15e},{t_bar:.15e},{pass}");
            }
            Err(e) => {
                rec.fail(&e.into());
                let _ = writeln!(table, "{b},{k},{eps},,,false");
            }
        }
        records.push(rec);
    }
    write(out, "costcheck.csv", &table)?;
    Ok(Report::new("costcheck", &hash, records))
}

pub fn run_boundary_energy(cfg: &RunConfig, out: Option<&Path>, timings: &mut Timings) -> Result<Report, CliError> {
    let curve = cfg.curve()?;
    let geom = make_geometry(&curve)?;
    let hash = cfg.hash();
    let mut records = Vec::new();
    for &b in &cfg.b {
        for &eps in &cfg.eps {
            let id = tag(b, None, eps);
            let start = Instant::now();
            let mut rec = Record::new(&id, &[C::DOMAIN_ENERGY], &hash)
                .input("b", b)
                .input("eps", eps)
                .input("geometry", geometry_hash(&curve));
            let res = geom.params(b, eps).and_then(|p| {
                let be = boundary_energy_with(&geom, &p, cfg.grid_nodes, CurvatureSampling::CellMean)?;
                let n = be.cells.len();
                let fine = riemann_energy(&geom, &p, 4 * n, cfg.grid_nodes, CurvatureSampling::CellMean)?;
                Ok((be, fine))
            });
            match res {
                Ok((be, fine)) => {
                    let rel = (be.leading - fine).abs() / fine.abs();
                    rec.output("energy", be.leading);
                    rec.output("eps_energy", eps * be.leading);
                    rec.output("refined_4x", fine);
                    rec.output("n_cells", be.cells.len());
                    rec.residual("riemann_relative", rel);
                    rec.check("riemann", rel <= cfg.tolerances.riemann);
                    write(out, &format!("boundary/{id}.csv"), &cells_csv(&be))?;
                }
                Err(e) => rec.fail(&e.into()),
            }
            timings.0.insert(id, start.elapsed().as_secs_f64());
            records.push(rec);
        }
    }
    Ok(Report::new("boundary-energy", &hash, records))
}

pub fn run_trial_energy(cfg: &RunConfig, out: Option<&Path>, timings: &mut Timings) -> Result<Report, CliError> {
    let curve = cfg.curve()?;
    let geom = make_geometry(&curve)?;
    let hash = cfg.hash();
    let mut records = Vec::new();
    let mut table = String::from("b,eps,trial,riemann,gap\n");
    for &b in &cfg.b {
        for &eps in &cfg.eps {
            let id = tag(b, None, eps);
            let start = Instant::now();
            let mut rec = Record::new(&id, &[C::DOMAIN_ENERGY], &hash).input("b", b).input("eps", eps);
            let res = geom.params(b, eps).and_then(|p| {
                let trial = build_trial_with(&geom, &p, cfg.grid_nodes, cfg.nodes_per_cell)?;
                let e = trial.ansatz_energy()?;
                Ok((trial, e))
            });
            match res {
                Ok((trial, e)) => {
                    let riemann = trial.riemann_energy();
                    rec.output("trial_energy", e);
                    rec.output("riemann_energy", riemann);
                    rec.output("gap", e - riemann);
                    rec.output("winding", trial.winding);
                    rec.output("remainder_over_eps2", (e - riemann) / (eps * eps));
                    rec.residual("closure", trial.closure_residual().abs());
                    // Upper bound: the trial exceeds the cell sum by at most O(eps^2) up to logs.
                    rec.check("upper_bound", e - riemann <= (eps * eps.ln()).powi(2));
                    let _ = writeln!(table, "{b},{eps},{e:.15e},{riemann:.15e},{:.15e}", e - riemann);
                    write(out, &format!("trial/{id}.json"), &json(&TrialManifest::new(&trial, e)))?;
                    write(out, &format!("trial/{id}.csv"), &trial_csv(&trial, cfg.csv_stride))?;
                }
                Err(e) => rec.fail(&e.into()),
            }
            timings.0.insert(id, start.elapsed().as_secs_f64());
            records.push(rec);
        }
    }
    write(out, "trial-energy.csv", &table)?;
    Ok(Report::new("trial-energy", &hash, records))
}

fn case_record(id: &str, hash: &str, s: &CaseSummary, cfg: &RunConfig) -> Record {
    let mut rec = Record::new(id, &[C::DISC_ENERGY, C::DOMAIN_ENERGY, C::DENSITY, C::WINDING], hash)
        .input("b", s.b)
        .input("eps", s.eps);
    rec.output("summary", s);
    let slack = (s.riemann - s.minimized).max(0.0);
    rec.residual("gap", s.gap);
    rec.residual("lower_slack", slack);
    rec.check("below_trial", s.minimized <= s.trial_lifted);
    rec.check("lower_slack", slack <= cfg.tolerances.slack_fraction * s.riemann.abs());
    rec
}

pub fn run_gl2d(cfg: &RunConfig, out: Option<&Path>, timings: &mut Timings) -> Result<Report, CliError> {
    let curve = cfg.curve()?;
    let geom = make_geometry(&curve)?;
    let hash = cfg.hash();
    let mut records = Vec::new();
    for &b in &cfg.b {
        for &eps in &cfg.eps {
            let id = tag(b, None, eps);
            let mut rec;
            match solve_case(&geom, b, eps, cfg).and_then(|c| Ok((c.summary()?, c))) {
                Ok((s, case)) => {
                    timings.0.insert(id.clone(), case.seconds);
                    rec = case_record(&id, &hash, &s, cfg);
                    let manifest = FieldManifest {
                        eps,
                        b,
                        geometry_hash: geometry_hash(&curve),
                        energy: case.minimized.energy,
                        degree: s.degree,
                        nodes: s.mesh_nodes,
                    };
                    write(out, &format!("gl2d/{id}.json"), &json(&manifest))?;
                    write(out, &format!("gl2d/{id}.csv"), &field_csv(&case.minimized.field))?;
                }
                Err(e) => {
                    rec = Record::new(&id, &[C::DISC_ENERGY], &hash).input("b", b).input("eps", eps);
                    rec.fail(&e);
                }
            }
            records.push(rec);
        }
    }
    Ok(Report::new("gl2d", &hash, records))
}

/// Scaling checks across an `eps` sweep (largest `eps` first).
pub fn sweep_record(hash: &str, rows: &[CaseSummary]) -> Record {
    let mut rows: Vec<&CaseSummary> = rows.iter().collect();
    rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let mut rec = Record::new("sweep", &[C::DISC_ENERGY, C::DENSITY], hash);
    let col = |f: &dyn Fn(&CaseSummary) -> Option<f64>| rows.iter().map(|r| f(r)).collect::<Option<Vec<f64>>>();
    let gaps = col(&|r| Some(r.gap));
    let dens = col(&|r| Some(r.density_relative));
    let pans = col(&|r| r.pan_error);
    rec.output("eps", rows.iter().map(|r| r.eps).collect::<Vec<_>>());
    rec.output("gap", &gaps);
    rec.output("density_relative", &dens);
    rec.output("pan", &pans);
    rec.check("gap_decreasing", gaps.as_deref().is_some_and(strictly_decreasing));
    rec.check("density_decreasing", dens.as_deref().is_some_and(strictly_decreasing));
    rec.check("pan_decreasing", pans.as_deref().is_some_and(strictly_decreasing));
    rec
}

pub fn run_pipeline(cfg: &RunConfig, out: Option<&Path>, timings: &mut Timings) -> Result<Report, CliError> {
    let curve = cfg.curve()?;
    let geom = make_geometry(&curve)?;
    let hash = cfg.hash();
    let mut records = Vec::new();
    for &b in &cfg.b {
        let mut rows = Vec::new();
        for &eps in &cfg.eps {
            let id = tag(b, None, eps);
            match solve_case(&geom, b, eps, cfg).and_then(|c| Ok((c.summary()?, c))) {
                Ok((s, case)) => {
                    timings.0.insert(id.clone(), case.seconds);
                    let mut rec = case_record(&id, &hash, &s, cfg);
                    rec.output(
                        "cells",
                        case.boundary.cells.iter().map(|c| (c.k_n, c.alpha_n, c.e1d)).collect::<Vec<_>>(),
                    );
                    write(out, &format!("pipeline/{id}.cells.csv"), &cells_csv(&case.boundary))?;
                    records.push(rec);
                    rows.push(s);
                }
                Err(e) => {
                    // Stage failures abort the sweep with a partial report.
                    let mut rec = Record::new(&id, &[C::DISC_ENERGY], &hash).input("b", b).input("eps", eps);
                    rec.fail(&e);
                    records.push(rec);
                    return Ok(Report::new("pipeline", &hash, records));
                }
            }
        }
        if rows.len() > 1 {
            let mut rec = sweep_record(&hash, &rows);
            rec.id = format!("sweep_b{b}");
            records.push(rec);
        }
    }
    Ok(Report::new("pipeline", &hash, records))
}

/// Merges every `*.report.json` in `dir` into a per-criterion summary.
pub fn run_report(dir: &Path) -> Result<Report, CliError> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".report.json") && !p.ends_with("report.report.json"))
        .collect();
    paths.sort();
    let mut by_criterion = std::collections::BTreeMap::<String, (usize, usize)>::new();
    let mut hashes = Vec::new();
    for p in &paths {
        let r: Report = serde_json::from_str(&fs::read_to_string(p)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        hashes.push(r.config_hash.clone());
        for rec in &r.records {
            for c in &rec.criteria {
                let e = by_criterion.entry(c.clone()).or_default();
                e.0 += 1;
                e.1 += usize::from(rec.pass);
            }
        }
    }
    hashes.sort();
    hashes.dedup();
    let hash = hashes.join("+");
    let records = by_criterion
        .into_iter()
        .map(|(c, (n, passed))| {
            let mut rec = Record::new(&c, &[c.as_str()], &hash);
            rec.output("records", n);
            rec.output("passed", passed);
            rec.check("all", n == passed);
            rec
        })
        .collect();
    Ok(Report::new("report", &hash, records))
}
