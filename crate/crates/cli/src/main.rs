use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use surfgl_cli::commands;
use surfgl_cli::config::ensure_dir;
use surfgl_cli::error::exit;
use surfgl_cli::{CliError, Init, RunConfig, Timings};

#[derive(Parser)]
#[command(name = "surfgl", version, about = "Surface superconductivity boundary-layer toolkit")]
struct Cli {
    /// Output directory for reports and artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for independent cases.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON run configuration; command-line values override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Sweep {
    /// Comma-separated field strengths b.
    #[arg(long, value_delimiter = ',')]
    b: Option<Vec<f64>>,
    /// Comma-separated eps values; an empty list is a usage error.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    eps: Option<Vec<f64>>,
    /// Comma-separated curvatures.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<f64>>,
    /// Geometry JSON file (defaults to the unit circle).
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// 1D grid nodes.
    #[arg(long)]
    grid_nodes: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal pairs and solver contracts over a (b, k, eps) sweep.
    Profile1d(Sweep),
    /// de Gennes constant from the half-line harmonic oscillator.
    Theta0 {
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Cost-function positivity table.
    Costcheck {
        #[command(flatten)]
        sweep: Sweep,
        /// Cost margin (defaults to |log eps|^-5).
        #[arg(long)]
        d_eps: Option<f64>,
    },
    /// Cell decomposition and curvature-integrated boundary energy.
    BoundaryEnergy(Sweep),
    /// Trial-state energy against the Riemann sum.
    TrialEnergy(Sweep),
    /// Frozen-field 2D minimization.
    Gl2d {
        #[command(flatten)]
        sweep: Sweep,
        #[arg(long, value_enum)]
        init: Option<Init>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Boundary energy, trial state, 2D minimizer and diagnostics per eps.
    Pipeline(Sweep),
    /// Per-criterion summary of the reports in --out.
    Report,
}

fn apply(cfg: &mut RunConfig, s: Sweep) {
    if let Some(v) = s.b {
        cfg.b = v;
    }
    if let Some(v) = s.eps {
        cfg.eps = v;
    }
    if let Some(v) = s.k {
        cfg.k = v;
    }
    if let Some(v) = s.geometry {
        cfg.geometry = Some(v);
    }
    if let Some(v) = s.grid_nodes {
        cfg.grid_nodes = v;
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let (name, sweep) = match cli.command {
        Command::Profile1d(s) => ("profile1d", Some(s)),
        Command::Theta0 { resolution } => {
            if let Some(r) = resolution {
                cfg.theta0_resolution = r;
            }
            ("theta0", None)
        }
        Command::Costcheck { sweep, d_eps } => {
            cfg.d_eps = d_eps.or(cfg.d_eps);
            ("costcheck", Some(sweep))
        }
        Command::BoundaryEnergy(s) => ("boundary-energy", Some(s)),
        Command::TrialEnergy(s) => ("trial-energy", Some(s)),
        Command::Gl2d { sweep, init, max_iter, seed } => {
            if let Some(i) = init {
                cfg.init = i;
            }
            if let Some(m) = max_iter {
                cfg.minimize.max_iter = m;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            ("gl2d", Some(sweep))
        }
        Command::Pipeline(s) => ("pipeline", Some(s)),
        Command::Report => ("report", None),
    };
    if let Some(s) = sweep {
        apply(&mut cfg, s);
    }
    cfg.validate()?;
    let out = ensure_dir(&cli.out)?;
    let mut timings = Timings::default();
    let o = Some(out.as_path());
    let report = match name {
        "profile1d" => commands::run_profile1d(&cfg, o, &mut timings)?,
        "theta0" => commands::run_theta0(&cfg, o, &mut timings)?,
        "costcheck" => commands::run_costcheck(&cfg, o, &mut timings)?,
        "boundary-energy" => commands::run_boundary_energy(&cfg, o, &mut timings)?,
        "trial-energy" => commands::run_trial_energy(&cfg, o, &mut timings)?,
        "gl2d" => commands::run_gl2d(&cfg, o, &mut timings)?,
        "pipeline" => commands::run_pipeline(&cfg, o, &mut timings)?,
        _ => commands::run_report(&out)?,
    };
    report.write(&out)?;
    if name != "report" {
        timings.write(&out, name)?;
    }
    for r in &report.records {
        println!("{:<28} {}", r.id, if r.pass { "pass" } else { "FAIL" });
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
