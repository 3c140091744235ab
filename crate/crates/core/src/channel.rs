//! The storage process viewed as a linear bosonic channel from the input
//! light mode to the stored molecular mode.
//!
//! Norms are taken in the solvers' symmetric variables, where lossless
//! adiabatic storage maps the input mode onto the stable-molecule mode with
//! unit amplitude. Because the channel is linear, a coherent input of
//! amplitude alpha is delivered as a coherent state of amplitude -eta alpha;
//! other input states follow from the same map.

use num_complex::Complex64;

use crate::analytic::{group_velocity_lossy, AdiabaticKernel};
use crate::envelope::EnvelopeFn;
use crate::error::{Error, Result};
use crate::mb::History;
use crate::params::PhysicalParams;
use crate::schedule::PulseSchedule;

/// Storage counts as complete when the control field at the end of the run
/// is below this fraction of G everywhere in the medium.
pub const STORAGE_OFF_RATIO: f64 = 1e-3;

/// Weak-excitation warning threshold on molecules per atom.
pub const WEAK_EXCITATION_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoredMode {
    pub eta_numeric: f64,
    /// Normalized overlap with the adiabatically stored input mode.
    pub mode_overlap: f64,
    /// arg of the overlap with the (sign-free) stored input mode; pi means
    /// the molecules carry the input with a minus sign.
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    /// `None` when storage did not complete within the run.
    pub stored: Option<StoredMode>,
    pub eta_analytic: Option<f64>,
    pub vg_measured: Option<f64>,
    pub vg_predicted: f64,
    pub alpha: Complex64,
    pub fidelity_coherent: Option<f64>,
    pub conservation_residual: f64,
    pub bright_fraction_max: f64,
    pub molecular_fraction_max: Option<f64>,
    pub weak_excitation: Option<WeakExcitation>,
}

impl TransferReport {
    pub fn eta_numeric(&self) -> Option<f64> {
        self.stored.map(|s| s.eta_numeric)
    }
}

/// Largest control field seen by any cell at the last snapshot.
fn final_control(history: &History, schedule: &PulseSchedule) -> f64 {
    let last = history.final_state();
    (0..history.z.len())
        .map(|j| schedule.omega_at(history.lab_time(last.t, j)))
        .fold(0.0, f64::max)
}

/// Stored amplitude, overlap and phase of the final stable-molecule profile.
/// The reference mode is the input carried along lossless characteristics,
/// E_in(t_e) / cos theta(t_e), which is the conserved dark-state amplitude.
pub fn extract_eta(
    history: &History,
    params: &PhysicalParams,
    schedule: &PulseSchedule,
    input: &EnvelopeFn,
) -> Result<StoredMode> {
    let g = params.coupling();
    let w_end = final_control(history, schedule);
    if w_end > STORAGE_OFF_RATIO * g {
        return Err(Error::Regime(format!(
            "storage not complete: Omega(t_end) = {w_end:e} s^-1 exceeds {STORAGE_OFF_RATIO:e} G"
        )));
    }
    let influx = history.input_norm();
    if input.is_zero() || influx <= 0.0 {
        return Err(Error::DegenerateInput("no excitation entered the medium".into()));
    }
    let last = history.final_state();
    let dz = history.dz_scaled();
    let stored: f64 = last.s.iter().map(|s| s.norm_sqr()).sum::<f64>() * dz;
    let eta_numeric = (stored / influx).sqrt();

    let kernel = AdiabaticKernel::new(params, schedule);
    let t_last = history.lab_time(last.t, history.z.len() - 1);
    let chars = kernel.characteristics(0.0, t_last, 2001, false)?;
    let mut dot = Complex64::new(0.0, 0.0);
    let mut ref_norm = 0.0;
    for (j, s) in last.s.iter().enumerate() {
        let distance = history.z[j] - history.grid.z_min;
        let Some(te) = chars.entry_time(history.lab_time(last.t, j), distance) else {
            continue;
        };
        let c = kernel.theta_at(te).cos();
        if c <= 0.0 {
            continue;
        }
        let r = input.eval(te) / c;
        dot += r.conj() * s;
        ref_norm += r.norm_sqr();
    }
    let s_norm = stored / dz;
    let mode_overlap = if ref_norm > 0.0 && s_norm > 0.0 {
        (dot.norm() / (ref_norm * s_norm).sqrt()).min(1.0)
    } else {
        0.0
    };
    Ok(StoredMode {
        eta_numeric,
        mode_overlap,
        phase: dot.arg().rem_euclid(std::f64::consts::TAU),
    })
}

/// exp(-int Gamma) from the input centroid time to the end of the run.
pub fn eta_analytic(
    history: &History,
    params: &PhysicalParams,
    schedule: &PulseSchedule,
    input: &EnvelopeFn,
) -> Result<f64> {
    let kernel = AdiabaticKernel::new(params, schedule);
    let t0 = input.centroid().max(0.0);
    let t1 = history.grid.t_end();
    Ok((-kernel.gamma_integral_between(t0, t1.max(t0))?).exp())
}

/// Squared overlap of the coherent states -alpha and -eta alpha.
pub fn coherent_fidelity(eta: f64, alpha: Complex64) -> f64 {
    (-alpha.norm_sqr() * (1.0 - eta).powi(2)).exp()
}

/// Mean molecule number per input photon.
pub fn photon_number_map(eta: f64) -> f64 {
    eta * eta
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakExcitation {
    /// Expected molecules per atom.
    pub ratio: f64,
    pub ok: bool,
}

impl WeakExcitation {
    /// How far below the warning threshold the ratio sits (negative when over).
    pub fn margin(&self) -> f64 {
        WEAK_EXCITATION_LIMIT - self.ratio
    }
}

pub fn weak_excitation_check(params: &PhysicalParams, input_photons: f64, eta: f64) -> WeakExcitation {
    let ratio = input_photons.max(0.0) * eta * eta / params.n_atoms;
    WeakExcitation {
        ratio,
        ok: ratio <= WEAK_EXCITATION_LIMIT,
    }
}

/// Photon number carried by the input in the solvers' normalization.
pub fn input_photon_count(history: &History, params: &PhysicalParams) -> f64 {
    history.input_norm() * history.units.z_unit / params.length
}

fn centroid(weights: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let (m0, m1) = weights.fold((0.0, 0.0), |(a, b), (x, w)| (a + w, b + w * x));
    (m0 > 0.0).then(|| m1 / m0)
}

/// Envelope speed in the medium, m/s.
///
/// A pulse that leaves the medium is timed by the delay of its intensity
/// centroid between entrance and exit. A pulse that stays inside is tracked
/// by the centroid of its matter excitation over the snapshots taken while
/// it is fully inside and the control field is steady.
pub fn measure_group_velocity(history: &History, params: &PhysicalParams, schedule: &PulseSchedule) -> Option<f64> {
    let b = history.final_balance();
    if b.influx <= 0.0 {
        return None;
    }
    let c = params.c_light;
    let len = history.grid.length();
    let dt = history.grid.dt;
    if b.outflux >= 0.5 * b.influx {
        let t_in = centroid(history.e_in.iter().enumerate().map(|(k, e)| (k as f64 * dt, e.norm_sqr())))?;
        let t_out = centroid(history.e_out.iter().enumerate().map(|(k, e)| (k as f64 * dt, e.norm_sqr())))?;
        let transit = match history.frame() {
            crate::grid::Frame::Retarded => t_out - t_in + len / c,
            crate::grid::Frame::Lab => t_out - t_in,
        };
        return (transit > 0.0).then(|| len / transit);
    }
    let mut pts = Vec::new();
    for (st, bal) in history.snapshots.iter().zip(&history.balance) {
        if bal.influx < 0.99 * b.influx || bal.stored < 0.99 * bal.influx {
            continue;
        }
        let w_first = schedule.omega_at(history.lab_time(st.t, 0));
        let w_last = schedule.omega_at(history.lab_time(st.t, history.z.len() - 1));
        if (w_first - w_last).abs() > 1e-9 * w_first.abs().max(1e-300) {
            continue;
        }
        let zc = centroid(
            history
                .z
                .iter()
                .zip(st.p.iter().zip(&st.s))
                .map(|(&z, (p, s))| (z, p.norm_sqr() + s.norm_sqr())),
        )?;
        pts.push((st.t, zc));
    }
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (mt, mz) = pts.iter().fold((0.0, 0.0), |(a, b), (t, z)| (a + t / n, b + z / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, z)| (a + (t - mt) * (z - mz), b + (t - mt).powi(2)));
    let u = sxy / sxx;
    match history.frame() {
        crate::grid::Frame::Retarded => Some(u / (1.0 + u / c)),
        crate::grid::Frame::Lab => Some(u),
    }
}

/// Assembles the report for one linearized run. Storage quantities are left
/// empty when the control field is still on at the end.
pub fn build_report(
    history: &History,
    params: &PhysicalParams,
    schedule: &PulseSchedule,
    input: &EnvelopeFn,
    alpha: Complex64,
    molecular_fraction_max: Option<f64>,
) -> Result<TransferReport> {
    let stored = match extract_eta(history, params, schedule, input) {
        Ok(s) => Some(s),
        Err(Error::Regime(_)) | Err(Error::DegenerateInput(_)) => None,
        Err(e) => return Err(e),
    };
    let eta_an = if stored.is_some() {
        Some(eta_analytic(history, params, schedule, input)?)
    } else {
        None
    };
    let photons = input_photon_count(history, params);
    let reference_omega = schedule.omega_at(input.centroid().max(0.0));
    Ok(TransferReport {
        stored,
        eta_analytic: eta_an,
        vg_measured: measure_group_velocity(history, params, schedule),
        vg_predicted: group_velocity_lossy(params, reference_omega),
        alpha,
        fidelity_coherent: stored.map(|s| coherent_fidelity(s.eta_numeric.min(1.0), alpha)),
        conservation_residual: history.max_relative_residual(),
        bright_fraction_max: history
            .bright_state_fraction(params, schedule)
            .into_iter()
            .fold(0.0, f64::max),
        molecular_fraction_max,
        weak_excitation: stored.map(|s| weak_excitation_check(params, photons, s.eta_numeric)),
    })
}
