use surfgl_cli::case::pan_threshold;
use surfgl_cli::checks::*;
use surfgl_cli::config::RunConfig;
use surfgl_cli::error::{exit, CliError};
use surfgl_core::params::{Grid1D, ProblemParams};
use surfgl_core::profile1d::optimal_phase;
use surfgl_core::Error;

#[test]
fn strictly_decreasing_sequences() {
    assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
    assert!(!strictly_decreasing(&[3.0, 3.0, 1.0]));
    assert!(!strictly_decreasing(&[1.0, 2.0]));
    assert!(strictly_decreasing(&[1.0]));
}

#[test]
fn pan_threshold_exceeds_one_at_desk_scale() {
    for (eps, want) in [(0.08, 1.6579382611046265), (0.02, 2.038166845355281)] {
        assert!((pan_threshold(eps) - want).abs() <= 1e-12);
    }
    assert!(pan_threshold(1e-7) > 1.0 && pan_threshold(1e-8) < 1.0);
}

#[test]
fn profile_checks_pass_on_a_solved_pair() {
    let p = ProblemParams::with_default_width(1.4, 0.04, 1.0).unwrap();
    let g = Grid1D::layer(&p, 1024).unwrap();
    let pair = optimal_phase(1.0, &p, &g).unwrap();
    let c = ProfileChecks::of(&pair);
    let tol = RunConfig::default().tolerances;
    for (name, ok) in c.flags(&tol) {
        assert!(ok, "{name}");
    }
    let (mk, t_bar) = min_cost(&pair, p.d_eps).unwrap();
    assert!(mk >= -1e-8 && t_bar > 0.0);
}

#[test]
fn continuity_spread_of_identical_rows_is_one() {
    let r = continuity_row(1.4, 0.0, 0.5, 0.08, 512).unwrap();
    assert!(r.values().iter().all(|v| v.is_finite() && *v > 0.0));
    let s = continuity_spread(&[r.clone(), r]);
    assert_eq!(s, [1.0; 5]);
}

#[test]
fn exit_code_mapping() {
    let stage = |e: Error| CliError::stage("x")(e);
    assert_eq!(CliError::Usage("u".into()).exit_code(), exit::USAGE);
    assert_eq!(stage(Error::SelfIntersection { turning: 0.0 }).exit_code(), exit::USAGE);
    assert_eq!(stage(Error::MarginOutOfRange { d_eps: 1.0, max: 0.1 }).exit_code(), exit::USAGE);
    let bracket = Error::BracketFailure { lo: -4.0, hi: 0.0, best: 0.0 };
    assert_eq!(stage(bracket).exit_code(), exit::NON_CONVERGENCE);
    assert_eq!(stage(Error::EmptyRegion { gamma: 2.0 }).exit_code(), exit::CRITERION_FAILURE);
}

#[test]
fn config_validation() {
    let mut c = RunConfig::default();
    assert!(c.validate().is_ok());
    c.eps = vec![];
    assert!(c.validate().is_err());
    c.eps = vec![0.3];
    assert!(c.validate().is_err());
    let c = RunConfig { b: vec![-1.0], ..RunConfig::default() };
    assert!(c.validate().is_err());
    assert_eq!(RunConfig::default().hash(), RunConfig::default().hash());
}
