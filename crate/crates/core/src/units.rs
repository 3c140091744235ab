//! Characteristic scales used to non-dimensionalize the solver equations.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledUnits {
    pub t_unit: f64,
    pub z_unit: f64,
    pub rate_scale: f64,
}

impl ScaledUnits {
    /// Scales built from a characteristic time; z_unit = c * t_unit.
    pub fn new(t_unit: f64, c_light: f64) -> Result<Self> {
        if !(t_unit.is_finite() && t_unit > 0.0) {
            return Err(Error::Config(format!("time unit must be > 0, got {t_unit}")));
        }
        Ok(Self {
            t_unit,
            z_unit: c_light * t_unit,
            rate_scale: 1.0 / t_unit,
        })
    }

    pub fn time(&self, t: f64) -> f64 {
        t / self.t_unit
    }

    pub fn unscale_time(&self, t: f64) -> f64 {
        t * self.t_unit
    }

    pub fn length(&self, z: f64) -> f64 {
        z / self.z_unit
    }

    pub fn unscale_length(&self, z: f64) -> f64 {
        z * self.z_unit
    }

    pub fn rate(&self, r: f64) -> f64 {
        r / self.rate_scale
    }

    pub fn unscale_rate(&self, r: f64) -> f64 {
        r * self.rate_scale
    }

    pub fn velocity(&self, v: f64) -> f64 {
        v * self.t_unit / self.z_unit
    }

    pub fn unscale_velocity(&self, v: f64) -> f64 {
        v * self.z_unit / self.t_unit
    }
}
