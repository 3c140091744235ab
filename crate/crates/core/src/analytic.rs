//! Closed-form adiabatic results: mixing angle, group velocities, the
//! loss and Raman-gain integrals, and the envelope solutions built on them.
//!
//! Everything here is evaluated in SI units. Field and molecular envelopes
//! are given in the symmetric normalization of the linearized solver, in
//! which lossless storage maps a unit-norm light mode onto a unit-norm
//! molecular mode.

use num_complex::Complex64;

use crate::envelope::EnvelopeFn;
use crate::error::{Error, Result};
use crate::params::{DetuningWarning, PhysicalParams};
use crate::quadrature::Quadrature;
use crate::schedule::PulseSchedule;

/// Ratio that counts as "much greater" for regime checks.
pub const STRONG_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeWarning {
    /// Omega(0)^2 is not much larger than G^2 and gamma_be gamma_bc.
    WeakInitialControl,
    /// Omega(t)^2 is not much smaller than G^2.
    ControlNotOff,
    /// The schedule is not monotonically switching off.
    NotMonotoneOff,
    Detuning(DetuningWarning),
}

/// A value computed outside (or at the edge of) its validity regime still
/// comes back, with the reasons attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub warnings: Vec<RegimeWarning>,
}

impl<T> Flagged<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferFactors {
    pub f: f64,
    pub h: f64,
    /// Amplitude transfer exp(-int Gamma dt).
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeEstimates {
    /// Group velocity with the control field off, m/s.
    pub v_g_limit: f64,
    /// Storage time scale 1/gamma_bc; `None` when gamma_bc = 0 (unbounded).
    pub t_max: Option<f64>,
    /// Propagation depth gamma_be c / G^2, m.
    pub z_max: f64,
}

/// Mixing angle theta with tan^2 theta = G^2 / Omega^2, in [0, pi/2].
pub fn mixing_angle(params: &PhysicalParams, omega: f64) -> f64 {
    params.coupling().atan2(omega)
}

/// v_g = c cos^2 theta = c / (1 + G^2/Omega^2).
pub fn group_velocity_lossless(params: &PhysicalParams, omega: f64) -> f64 {
    let w2 = omega * omega;
    let g2 = params.coupling().powi(2);
    if w2 + g2 == 0.0 {
        return params.c_light;
    }
    params.c_light * w2 / (w2 + g2)
}

/// v_g = c (1 + G^2 / (Omega^2 + gamma_be gamma_bc))^-1.
pub fn group_velocity_lossy(params: &PhysicalParams, omega: f64) -> f64 {
    let s = omega * omega + params.loss_product();
    let g2 = params.coupling().powi(2);
    if s + g2 == 0.0 {
        return params.c_light;
    }
    params.c_light * s / (s + g2)
}

/// Instantaneous amplitude decay rate Gamma(t) for a given Omega.
pub fn decay_rate(params: &PhysicalParams, omega: f64) -> f64 {
    let g2 = params.coupling().powi(2);
    let denom = omega * omega + params.loss_product() + g2;
    if denom == 0.0 {
        return 0.0;
    }
    g2 * params.gamma_bc() / denom
}

pub fn regime_estimates(params: &PhysicalParams) -> RegimeEstimates {
    let g2 = params.coupling().powi(2);
    let k = params.loss_product();
    let gbc = params.gamma_bc();
    RegimeEstimates {
        v_g_limit: if g2 + k == 0.0 {
            params.c_light
        } else {
            params.c_light * k / (g2 + k)
        },
        t_max: if gbc > 0.0 { Some(1.0 / gbc) } else { None },
        z_max: if g2 > 0.0 {
            params.gamma_be() * params.c_light / g2
        } else {
            f64::INFINITY
        },
    }
}

/// Schedule-dependent closed forms. Holds borrowed inputs and the quadrature
/// settings used for the time integrals.
#[derive(Debug, Clone, Copy)]
pub struct AdiabaticKernel<'a> {
    pub params: &'a PhysicalParams,
    pub schedule: &'a PulseSchedule,
    pub quad: Quadrature,
}

impl<'a> AdiabaticKernel<'a> {
    pub fn new(params: &'a PhysicalParams, schedule: &'a PulseSchedule) -> Self {
        Self {
            params,
            schedule,
            quad: Quadrature::default(),
        }
    }

    pub fn with_quadrature(mut self, quad: Quadrature) -> Self {
        self.quad = quad;
        self
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F, t0: f64, t1: f64) -> Result<f64> {
        self.quad
            .integrate_with_breaks(f, t0, t1, &self.schedule.breakpoints())
    }

    pub fn theta_at(&self, t: f64) -> f64 {
        mixing_angle(self.params, self.schedule.omega_at(t))
    }

    pub fn group_velocity_at(&self, t: f64, lossy: bool) -> f64 {
        let w = self.schedule.omega_at(t);
        if lossy {
            group_velocity_lossy(self.params, w)
        } else {
            group_velocity_lossless(self.params, w)
        }
    }

    /// Distance travelled by the envelope, int_0^t v_g dt'.
    pub fn retarded_coordinate(&self, t: f64, lossy: bool) -> Result<f64> {
        self.retarded_coordinate_between(0.0, t, lossy)
    }

    pub fn retarded_coordinate_between(&self, t0: f64, t1: f64, lossy: bool) -> Result<f64> {
        if self.params.coupling() == 0.0 && !lossy {
            return Ok(self.params.c_light * (t1 - t0));
        }
        self.integrate(|t| self.group_velocity_at(t, lossy), t0, t1)
    }

    pub fn gamma_rate(&self, t: f64) -> f64 {
        decay_rate(self.params, self.schedule.omega_at(t))
    }

    /// int_0^t Gamma(t') dt'.
    pub fn gamma_integral(&self, t: f64) -> Result<f64> {
        self.gamma_integral_between(0.0, t)
    }

    pub fn gamma_integral_between(&self, t0: f64, t1: f64) -> Result<f64> {
        if self.params.gamma_bc() == 0.0 || self.params.coupling() == 0.0 {
            return Ok(0.0);
        }
        self.integrate(|t| self.gamma_rate(t), t0, t1)
    }

    /// The Raman gain/absorption rate alpha(t):
    ///
    /// ```text
    /// alpha = -(G^2/Omega) [dOmega (Omega^2 + K) - 2 Omega^2 dOmega] / (Omega^2 + K)^2
    ///         / (1 + G^2 / (Omega^2 + K)),     K = gamma_be gamma_bc
    /// ```
    pub fn alpha_rate(&self, t: f64) -> f64 {
        let w = self.schedule.omega_at(t);
        let wd = self.schedule.omega_rate(t);
        if wd == 0.0 {
            return 0.0;
        }
        let g2 = self.params.coupling().powi(2);
        let k = self.params.loss_product();
        let s = w * w + k;
        let printed = -(g2 / w) * (wd * s - 2.0 * w * w * wd) / (s * s) / (1.0 + g2 / s);
        if printed.is_finite() {
            return printed;
        }
        // Deep in a switch-off tail Omega^4 underflows; use the same expression
        // with the 1/Omega factor taken through dOmega/Omega.
        let log_rate = self.schedule.omega_log_rate(t);
        let ratio = if s == 0.0 { -1.0 } else { (k - w * w) / s };
        -g2 * log_rate * ratio / (s + g2)
    }

    /// int_0^t alpha(t') dt'.
    pub fn alpha_integral(&self, t: f64) -> Result<f64> {
        self.alpha_integral_between(0.0, t)
    }

    pub fn alpha_integral_between(&self, t0: f64, t1: f64) -> Result<f64> {
        self.integrate(|t| self.alpha_rate(t), t0, t1)
    }

    /// The closed-form product that approximates exp(int_0^t alpha) when
    /// Omega(0)^2 >> G^2, K and Omega(t)^2 << G^2:
    ///
    /// ```text
    /// (Omega0/Omega_t)^f ((K + Omega_t^2)/Omega0^2) (Omega0^2/(K + G^2))^h
    /// ```
    pub fn closed_form_alpha_factor(&self, t: f64) -> Flagged<f64> {
        let w0 = self.schedule.omega_at(0.0);
        let wt = self.schedule.omega_at(t);
        let g2 = self.params.coupling().powi(2);
        let k = self.params.loss_product();
        let (f, h) = exponents(g2, k);
        let value = (w0 / wt).powf(f) * ((k + wt * wt) / (w0 * w0)) * (w0 * w0 / (k + g2)).powf(h);
        let mut warnings = self.initial_regime_warnings();
        if wt * wt * STRONG_RATIO > g2 {
            warnings.push(RegimeWarning::ControlNotOff);
        }
        Flagged { value, warnings }
    }

    fn initial_regime_warnings(&self) -> Vec<RegimeWarning> {
        let mut warnings = Vec::new();
        let w0 = self.schedule.omega_at(0.0);
        let g2 = self.params.coupling().powi(2);
        let k = self.params.loss_product();
        if w0 * w0 < STRONG_RATIO * g2.max(k) {
            warnings.push(RegimeWarning::WeakInitialControl);
        }
        if !self.schedule.is_monotone_off() {
            warnings.push(RegimeWarning::NotMonotoneOff);
        }
        warnings.extend(
            self.params
                .detuning_warnings()
                .into_iter()
                .map(RegimeWarning::Detuning),
        );
        warnings
    }

    pub fn transfer_factors(&self, t: f64) -> Result<TransferFactors> {
        let g2 = self.params.coupling().powi(2);
        let k = self.params.loss_product();
        let (f, h) = exponents(g2, k);
        let eta = (-self.gamma_integral(t)?).exp();
        Ok(TransferFactors { f, h, eta })
    }

    /// E(z, t) = (cos theta(t) / cos theta(0)) E(z - int_0^t v_g dt', 0).
    pub fn lossless_envelope(&self, env0: &EnvelopeFn, z: f64, t: f64) -> Result<Complex64> {
        let c0 = self.theta_at(0.0).cos();
        if self.schedule.omega_at(0.0) == 0.0 || c0 == 0.0 {
            return Err(Error::Domain(
                "mixing angle is pi/2 at t = 0 (control field off)".into(),
            ));
        }
        let ct = self.theta_at(t).cos();
        let shift = self.retarded_coordinate(t, false)?;
        Ok(env0.eval(z - shift) * (ct / c0))
    }

    /// Stable-molecule amplitude in the symmetric normalization:
    /// s(z, t) = -(G/Omega0) sqrt((Omega0^2 + G^2)/(Omega_t^2 + G^2)) E(z - X(t), 0).
    pub fn molecular_envelope_lossless(
        &self,
        env0: &EnvelopeFn,
        z: f64,
        t: f64,
    ) -> Result<Complex64> {
        let w0 = self.schedule.omega_at(0.0);
        if w0 == 0.0 {
            return Err(Error::Domain("Omega(0) = 0".into()));
        }
        let g = self.params.coupling();
        let wt = self.schedule.omega_at(t);
        let amp = -(g / w0) * ((w0 * w0 + g * g) / (wt * wt + g * g)).sqrt();
        let shift = self.retarded_coordinate(t, false)?;
        Ok(env0.eval(z - shift) * amp)
    }

    /// E(z, t) = E(z - X_lossy(t), 0) exp(int alpha) exp(-int Gamma).
    /// Outside Omega(0)^2 >> G^2, K (or for a schedule that is not switching
    /// off) the value is still returned, flagged.
    pub fn lossy_envelope(
        &self,
        env0: &EnvelopeFn,
        z: f64,
        t: f64,
    ) -> Result<Flagged<Complex64>> {
        let shift = self.retarded_coordinate(t, true)?;
        let log_amp = self.alpha_integral(t)? - self.gamma_integral(t)?;
        Ok(Flagged {
            value: env0.eval(z - shift) * log_amp.exp(),
            warnings: self.initial_regime_warnings(),
        })
    }

    /// Tabulates position and log-amplitude along characteristics on
    /// [t0, t1] for repeated evaluation.
    pub fn characteristics(
        &self,
        t0: f64,
        t1: f64,
        points: usize,
        lossy: bool,
    ) -> Result<Characteristics> {
        let n = points.max(2);
        let dt = (t1 - t0) / (n - 1) as f64;
        let times: Vec<f64> = (0..n).map(|i| t0 + dt * i as f64).collect();
        let mut position = vec![0.0; n];
        let mut log_amp = vec![0.0; n];
        for i in 1..n {
            position[i] = position[i - 1]
                + self.retarded_coordinate_between(times[i - 1], times[i], lossy)?;
            if lossy {
                log_amp[i] = log_amp[i - 1]
                    + self.alpha_integral_between(times[i - 1], times[i])?
                    - self.gamma_integral_between(times[i - 1], times[i])?;
            }
        }
        let velocity = times.iter().map(|&t| self.group_velocity_at(t, lossy)).collect();
        let log_rate = times
            .iter()
            .map(|&t| {
                if lossy {
                    self.alpha_rate(t) - self.gamma_rate(t)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Characteristics {
            lossy,
            times,
            position,
            velocity,
            log_amp,
            log_rate,
        })
    }
}

fn exponents(g2: f64, k: f64) -> (f64, f64) {
    if g2 + k == 0.0 {
        return (1.0, 0.5);
    }
    (g2 / (k + g2), 0.5 + k / (2.0 * k + 2.0 * g2))
}

/// Tabulated characteristic curves X(t) = int v_g dt and, for the lossy
/// model, the cumulative log-amplitude int (alpha - Gamma) dt. Values
/// between nodes use cubic Hermite interpolation with the exact slopes.
#[derive(Debug, Clone)]
pub struct Characteristics {
    pub lossy: bool,
    times: Vec<f64>,
    position: Vec<f64>,
    velocity: Vec<f64>,
    log_amp: Vec<f64>,
    log_rate: Vec<f64>,
}

pub(crate) fn hermite(t: f64, t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

impl Characteristics {
    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    fn locate(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&x| x <= t);
        i.clamp(1, self.times.len() - 1) - 1
    }

    /// X(t) measured from the start of the table; linear extrapolation outside.
    pub fn position(&self, t: f64) -> f64 {
        let i = self.locate(t);
        if t < self.times[0] {
            return self.position[0] + self.velocity[0] * (t - self.times[0]);
        }
        let last = self.times.len() - 1;
        if t > self.times[last] {
            return self.position[last] + self.velocity[last] * (t - self.times[last]);
        }
        hermite(
            t,
            self.times[i],
            self.times[i + 1],
            self.position[i],
            self.position[i + 1],
            self.velocity[i],
            self.velocity[i + 1],
        )
    }

    pub fn log_amplitude(&self, t: f64) -> f64 {
        let tc = t.clamp(self.times[0], self.t_end());
        let i = self.locate(tc);
        hermite(
            tc,
            self.times[i],
            self.times[i + 1],
            self.log_amp[i],
            self.log_amp[i + 1],
            self.log_rate[i],
            self.log_rate[i + 1],
        )
    }

    /// Time at which the characteristic that sits `distance` behind the
    /// front at time `t` crossed the entrance: X(t_e) = X(t) - distance.
    /// `None` when that point entered before the table starts.
    pub fn entry_time(&self, t: f64, distance: f64) -> Option<f64> {
        let target = self.position(t) - distance;
        if target < self.position[0] {
            return None;
        }
        if distance <= 0.0 {
            return Some(t);
        }
        // bisection on the monotone map
        let (mut lo, mut hi) = (self.times[0], t);
        if self.position(hi) < target {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.position(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}
