//! Complex envelope profiles of one variable.
//!
//! The same type serves as an initial spatial profile E(z, 0) for the
//! closed-form solutions and as the input time series E_in(t) entering the
//! medium in the solvers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

#[derive(Debug, Clone, PartialEq)]
pub enum EnvelopeShape {
    /// amplitude * exp(-(x - center)^2 / (2 width^2))
    Gaussian,
    /// amplitude * sech((x - center) / width)
    Sech,
    /// amplitude on |x - center| <= width, zero elsewhere.
    Rect,
    /// Uniformly sampled starting at `x0` with spacing `dx`, linearly
    /// interpolated, zero outside.
    Sampled { x0: f64, dx: f64, values: Vec<Complex64> },
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeFn {
    pub shape: EnvelopeShape,
    pub center: f64,
    pub width: f64,
    pub amplitude: Complex64,
}

impl EnvelopeFn {
    pub fn gaussian(center: f64, width: f64, amplitude: f64) -> Self {
        Self {
            shape: EnvelopeShape::Gaussian,
            center,
            width,
            amplitude: Complex64::new(amplitude, 0.0),
        }
    }

    pub fn sech(center: f64, width: f64, amplitude: f64) -> Self {
        Self {
            shape: EnvelopeShape::Sech,
            ..Self::gaussian(center, width, amplitude)
        }
    }

    pub fn rect(center: f64, half_width: f64, amplitude: f64) -> Self {
        Self {
            shape: EnvelopeShape::Rect,
            ..Self::gaussian(center, half_width, amplitude)
        }
    }

    pub fn sampled(x0: f64, dx: f64, values: Vec<Complex64>) -> Self {
        let n = values.len();
        let span = dx * n.saturating_sub(1) as f64;
        Self {
            shape: EnvelopeShape::Sampled { x0, dx, values },
            center: x0 + 0.5 * span,
            width: 0.5 * span,
            amplitude: Complex64::new(1.0, 0.0),
        }
    }

    pub fn zero() -> Self {
        Self {
            shape: EnvelopeShape::Zero,
            center: 0.0,
            width: 1.0,
            amplitude: Complex64::new(0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() || !self.amplitude.re.is_finite() || !self.amplitude.im.is_finite()
        {
            return Err(Error::Config("envelope center/amplitude must be finite".into()));
        }
        match &self.shape {
            EnvelopeShape::Zero => Ok(()),
            EnvelopeShape::Sampled { dx, values, .. } => {
                if !(*dx > 0.0) || values.is_empty() {
                    Err(Error::Config("sampled envelope needs dx > 0 and samples".into()))
                } else {
                    Ok(())
                }
            }
            _ => {
                if self.width.is_finite() && self.width > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("envelope width must be > 0, got {}", self.width)))
                }
            }
        }
    }

    /// Same profile times a complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        match &mut out.shape {
            EnvelopeShape::Sampled { values, .. } => values.iter_mut().for_each(|v| *v *= factor),
            _ => out.amplitude *= factor,
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        match &self.shape {
            EnvelopeShape::Zero => true,
            EnvelopeShape::Sampled { values, .. } => values.iter().all(|v| v.norm() == 0.0),
            _ => self.amplitude.norm() == 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let u = (x - self.center) / self.width;
        match &self.shape {
            EnvelopeShape::Gaussian => self.amplitude * (-0.5 * u * u).exp(),
            EnvelopeShape::Sech => self.amplitude / u.cosh(),
            EnvelopeShape::Rect => {
                if u.abs() <= 1.0 {
                    self.amplitude
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            EnvelopeShape::Sampled { x0, dx, values } => {
                let s = (x - x0) / dx;
                if s < 0.0 || s > (values.len() - 1) as f64 {
                    return Complex64::new(0.0, 0.0);
                }
                let i = (s.floor() as usize).min(values.len() - 1);
                if i + 1 >= values.len() {
                    return values[i];
                }
                let w = s - i as f64;
                values[i] * (1.0 - w) + values[i + 1] * w
            }
            EnvelopeShape::Zero => Complex64::new(0.0, 0.0),
        }
    }

    /// Interval outside which |E| is below ~1e-16 of its peak.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            EnvelopeShape::Gaussian => (self.center - 8.6 * self.width, self.center + 8.6 * self.width),
            EnvelopeShape::Sech => (self.center - 38.0 * self.width, self.center + 38.0 * self.width),
            EnvelopeShape::Rect => (self.center - self.width, self.center + self.width),
            EnvelopeShape::Sampled { x0, dx, values } => {
                (*x0, x0 + dx * (values.len().saturating_sub(1)) as f64)
            }
            EnvelopeShape::Zero => (self.center, self.center),
        }
    }

    /// Integral of |E|^2 over the whole line.
    pub fn norm_sq(&self) -> f64 {
        let a2 = self.amplitude.norm_sqr();
        match &self.shape {
            EnvelopeShape::Gaussian => a2 * self.width * std::f64::consts::PI.sqrt(),
            EnvelopeShape::Sech => 2.0 * a2 * self.width,
            EnvelopeShape::Rect => 2.0 * a2 * self.width,
            EnvelopeShape::Zero => 0.0,
            EnvelopeShape::Sampled { .. } => {
                let (a, b) = self.support();
                Quadrature::with_rel_tol(1e-12)
                    .integrate(|x| self.eval(x).norm_sqr(), a, b)
                    .unwrap_or(f64::NAN)
            }
        }
    }

    /// Intensity-weighted mean position.
    pub fn centroid(&self) -> f64 {
        match &self.shape {
            EnvelopeShape::Sampled { .. } => {
                let (a, b) = self.support();
                let q = Quadrature::with_rel_tol(1e-12);
                let m0 = q.integrate(|x| self.eval(x).norm_sqr(), a, b).unwrap_or(f64::NAN);
                let m1 = q.integrate(|x| x * self.eval(x).norm_sqr(), a, b).unwrap_or(f64::NAN);
                m1 / m0
            }
            _ => self.center,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_norms_match_quadrature() {
        let q = Quadrature::default();
        for env in [
            EnvelopeFn::gaussian(1.0, 0.3, 2.0),
            EnvelopeFn::sech(-1.0, 0.5, 0.7),
        ] {
            let (a, b) = env.support();
            let num = q.integrate(|x| env.eval(x).norm_sqr(), a, b).unwrap();
            assert_relative_eq!(env.norm_sq(), num, max_relative = 1e-12);
        }
    }

    #[test]
    fn sampled_interpolates_linearly() {
        let env = EnvelopeFn::sampled(
            0.0,
            1.0,
            vec![Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, 4.0)],
        );
        assert_eq!(env.eval(0.5), Complex64::new(1.0, 0.0));
        assert_eq!(env.eval(1.5), Complex64::new(1.0, 2.0));
        assert_eq!(env.eval(-0.1), Complex64::new(0.0, 0.0));
        assert_eq!(env.eval(2.0), Complex64::new(0.0, 4.0));
        assert_eq!(env.eval(2.1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn scaling_and_zero_detection() {
        let env = EnvelopeFn::gaussian(0.0, 1.0, 1.0);
        let doubled = env.scaled(Complex64::new(2.0, 0.0));
        assert_eq!(doubled.eval(0.3), env.eval(0.3) * 2.0);
        assert!(!env.is_zero());
        assert!(EnvelopeFn::zero().is_zero());
        assert!(env.scaled(Complex64::new(0.0, 0.0)).is_zero());
        assert!(EnvelopeFn::gaussian(0.0, 0.0, 1.0).validate().is_err());
    }
}
