use photomol::analytic::AdiabaticKernel;
use photomol::channel::{coherent_fidelity, weak_excitation_check};
use photomol::params::PhysicalParams;
use photomol::scenario::{cmd_sweep, run_simulation, RunOptions, ScenarioConfig};
use photomol::schedule::PulseSchedule;
use photomol::Error;

/// Storage with a weak excited-state decay so that bandwidth losses stay
/// well below the adiabatic decay.
const LOSSY: &str = "\
g_tilde = 50
n_atoms = 3e6
length = 120
c_light = 3e8
gamma_e = 2e6
gamma_c = 2e4
pulse_shape = tanh-off
omega0 = 3e7
t_switch = 1.05e-5
tau_switch = 1e-6
input_center = 5e-6
input_width = 1e-6
n_z = 256
t_end = 2.2e-5
output_stride = 1000
";

#[test]
fn numeric_efficiency_tracks_adiabatic_decay() {
    let cfg = ScenarioConfig::parse(LOSSY).unwrap();
    let out = run_simulation(&cfg, false).unwrap();
    let eta = out.report.eta_numeric().unwrap();
    let eta_a = out.report.eta_analytic.unwrap();
    assert!(eta < 1.0 && eta_a < 1.0);
    assert!(((eta - eta_a) / eta_a).abs() < 0.02, "{eta} vs {eta_a}");
    assert!(out.report.conservation_residual < 1e-6);
}

#[test]
fn efficiency_falls_with_molecular_decay() {
    let text = format!("{LOSSY}sweep = gamma_c:0:8e4:5\n");
    let cfg = ScenarioConfig::parse(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let rows = cmd_sweep(&cfg, &RunOptions::new(dir.path()), false).unwrap();
    let etas: Vec<f64> = rows.iter().map(|r| r.eta_numeric.unwrap()).collect();
    assert!(etas.windows(2).all(|w| w[1] < w[0]), "{etas:?}");
    let analytic: Vec<f64> = rows.iter().map(|r| r.eta_analytic.unwrap()).collect();
    assert!(analytic.windows(2).all(|w| w[1] < w[0]), "{analytic:?}");
}

#[test]
fn control_still_on_is_a_regime_error() {
    let cfg = ScenarioConfig::parse(LOSSY).unwrap().with_value("t_end", 1.1e-5).unwrap();
    let out = run_simulation(&cfg, false).unwrap();
    assert!(out.report.stored.is_none());
    assert!(out.report.eta_numeric().is_none());
}

#[test]
fn gamma_integral_against_direct_sum() {
    let p = PhysicalParams::default();
    let s = PulseSchedule::tanh_off(3e7, 1e-5, 1e-6);
    let k = AdiabaticKernel::new(&p, &s);
    let t = 3e-5;
    let n = 200_000;
    let h = t / n as f64;
    // midpoint rule as an independent oracle
    let direct: f64 = (0..n).map(|i| k.gamma_rate((i as f64 + 0.5) * h) * h).sum();
    let quad = k.gamma_integral(t).unwrap();
    assert!(((quad - direct) / direct).abs() < 1e-8, "{quad} vs {direct}");
}

#[test]
fn fidelity_and_excitation_limits() {
    let a = num_complex::Complex64::new(2.0, 0.0);
    assert!((coherent_fidelity(1.0, a) - 1.0).abs() < 1e-15);
    assert!((coherent_fidelity(0.5, a) - (-1.0f64).exp()).abs() < 1e-15);
    let p = PhysicalParams::default();
    assert!(weak_excitation_check(&p, 1e3, 0.9).ok);
    assert!(!weak_excitation_check(&p, 1e6, 0.9).ok);
}

#[test]
fn degenerate_sweep_axis_is_rejected() {
    let text = format!("{LOSSY}sweep = gamma_c:0:8e4:1\n");
    assert!(matches!(ScenarioConfig::parse(&text), Err(Error::ConfigKey { .. }) | Err(Error::Config(_))));
}
