//! Spatial/temporal discretization shared by both solvers.

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::schedule::PulseSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Local time tau = t - (z - z_min)/c; the field is a spatial ODE per slice.
    Retarded,
    /// Laboratory time with first-order upwind advection of the field.
    Lab,
}

impl Frame {
    pub fn name(&self) -> &'static str {
        match self {
            Frame::Retarded => "retarded",
            Frame::Lab => "lab",
        }
    }
}

/// Uniform cell-centred grid over [z_min, z_max] with `n_z` cells, and `n_t`
/// steps of length `dt` starting at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub z_min: f64,
    pub z_max: f64,
    pub n_z: usize,
    pub dt: f64,
    pub n_t: usize,
    pub frame: Frame,
}

pub const MIN_CELLS: usize = 16;

impl Grid1D {
    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / self.n_z as f64
    }

    pub fn length(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn t_end(&self) -> f64 {
        self.dt * self.n_t as f64
    }

    /// Cell centres.
    pub fn centers(&self) -> Vec<f64> {
        let dz = self.dz();
        (0..self.n_z)
            .map(|j| self.z_min + (j as f64 + 0.5) * dz)
            .collect()
    }

    pub fn validate(&self, params: &PhysicalParams) -> Result<()> {
        if self.n_z < MIN_CELLS {
            return Err(Error::Config(format!(
                "n_z must be >= {MIN_CELLS}, got {}",
                self.n_z
            )));
        }
        if !(self.z_min.is_finite() && self.z_max.is_finite() && self.z_max > self.z_min) {
            return Err(Error::Config("grid needs finite z_max > z_min".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.n_t == 0 {
            return Err(Error::Config("n_t must be >= 1".into()));
        }
        if self.frame == Frame::Lab && params.c_light * self.dt > self.dz() * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "lab frame needs c*dt <= dz (c*dt = {:e} m, dz = {:e} m)",
                params.c_light * self.dt,
                self.dz()
            )));
        }
        Ok(())
    }

    /// Same extent with cells and steps multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_z: self.n_z * factor,
            dt: self.dt / factor as f64,
            n_t: self.n_t * factor,
            ..*self
        }
    }
}

/// Default step: min(1/(50 gamma_be), tau_s/50, T/200, 1/(10 sqrt(G^2 + Omega0^2)),
/// 8 c/(G^2 l)), and for the lab frame also dz/c.
///
/// The G^2 l/c bound comes from the field sweep: every cell feels the
/// accumulated absorption of all cells upstream, and RK4 loses accuracy
/// (then stability) once dt G^2 l/c grows past about 20.
pub fn default_dt(
    params: &PhysicalParams,
    schedule: &PulseSchedule,
    pulse_width: f64,
    grid: &Grid1D,
) -> f64 {
    let dz = grid.dz();
    let mut dt = pulse_width / 200.0;
    let gbe = params.gamma_be();
    if gbe > 0.0 {
        dt = dt.min(1.0 / (50.0 * gbe));
    }
    let ts = schedule.switch_time_scale();
    if ts.is_finite() {
        dt = dt.min(ts / 50.0);
    }
    let rabi = params.coupling().hypot(schedule.omega0);
    if rabi > 0.0 {
        dt = dt.min(1.0 / (10.0 * rabi));
        let sweep = params.coupling().powi(2) * grid.length() / params.c_light;
        if sweep > 0.0 {
            dt = dt.min(8.0 / sweep);
        }
    }
    if grid.frame == Frame::Lab {
        dt = dt.min(dz / params.c_light);
    }
    dt
}
