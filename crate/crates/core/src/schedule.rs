//! Time-dependent control Rabi frequency Omega(t).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    Constant,
    /// Omega0 (1 - tanh((t - t0)/tau)) / 2
    TanhOff,
    /// Omega0 (1 + tanh((t - t0)/tau)) / 2
    TanhOn,
    /// Switch off around `t_switch`, back on around `t_reswitch`.
    OffThenOn,
    /// Linear interpolation between `(t, omega)` knots, held constant outside.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl PulseShape {
    pub fn name(&self) -> &'static str {
        match self {
            PulseShape::Constant => "constant",
            PulseShape::TanhOff => "tanh-off",
            PulseShape::TanhOn => "tanh-on",
            PulseShape::OffThenOn => "off-then-on",
            PulseShape::PiecewiseLinear(_) => "piecewise-linear",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub shape: PulseShape,
    pub omega0: f64,
    pub t_switch: f64,
    pub tau_switch: f64,
    pub t_reswitch: Option<f64>,
}

/// (1 - tanh x)/2 written as a logistic so it stays accurate far in the tail.
fn falling(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-2.0 * x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + (2.0 * x).exp())
    }
}

fn rising(x: f64) -> f64 {
    falling(-x)
}

impl PulseSchedule {
    pub fn constant(omega0: f64) -> Self {
        Self {
            shape: PulseShape::Constant,
            omega0,
            t_switch: 0.0,
            tau_switch: 1.0,
            t_reswitch: None,
        }
    }

    pub fn tanh_off(omega0: f64, t_switch: f64, tau_switch: f64) -> Self {
        Self {
            shape: PulseShape::TanhOff,
            omega0,
            t_switch,
            tau_switch,
            t_reswitch: None,
        }
    }

    pub fn tanh_on(omega0: f64, t_switch: f64, tau_switch: f64) -> Self {
        Self {
            shape: PulseShape::TanhOn,
            ..Self::tanh_off(omega0, t_switch, tau_switch)
        }
    }

    pub fn off_then_on(omega0: f64, t_switch: f64, t_reswitch: f64, tau_switch: f64) -> Self {
        Self {
            shape: PulseShape::OffThenOn,
            omega0,
            t_switch,
            tau_switch,
            t_reswitch: Some(t_reswitch),
        }
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Self {
        let omega0 = knots.iter().map(|k| k.1).fold(0.0, f64::max);
        Self {
            shape: PulseShape::PiecewiseLinear(knots),
            omega0,
            t_switch: 0.0,
            tau_switch: 1.0,
            t_reswitch: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 >= 0.0) {
            return Err(Error::Config(format!(
                "omega0 must be finite and >= 0, got {}",
                self.omega0
            )));
        }
        match &self.shape {
            PulseShape::Constant => {}
            PulseShape::TanhOff | PulseShape::TanhOn | PulseShape::OffThenOn => {
                if !(self.tau_switch.is_finite() && self.tau_switch > 0.0) {
                    return Err(Error::Config(format!(
                        "tau_switch must be > 0, got {}",
                        self.tau_switch
                    )));
                }
                if !self.t_switch.is_finite() {
                    return Err(Error::Config("t_switch must be finite".into()));
                }
                if self.shape == PulseShape::OffThenOn {
                    match self.t_reswitch {
                        Some(tr) if tr.is_finite() && tr > self.t_switch => {}
                        _ => {
                            return Err(Error::Config(
                                "off-then-on needs t_reswitch > t_switch".into(),
                            ))
                        }
                    }
                }
            }
            PulseShape::PiecewiseLinear(knots) => {
                if knots.is_empty() {
                    return Err(Error::Config("piecewise-linear needs at least one knot".into()));
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::Config(
                            "piecewise-linear knot times must be strictly increasing".into(),
                        ));
                    }
                }
                if knots.iter().any(|k| !(k.1 >= 0.0) || !k.0.is_finite() || !k.1.is_finite()) {
                    return Err(Error::Config(
                        "piecewise-linear knots must be finite with omega >= 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Omega(t), rad/s.
    pub fn omega_at(&self, t: f64) -> f64 {
        let x = (t - self.t_switch) / self.tau_switch;
        match &self.shape {
            PulseShape::Constant => self.omega0,
            PulseShape::TanhOff => self.omega0 * falling(x),
            PulseShape::TanhOn => self.omega0 * rising(x),
            PulseShape::OffThenOn => {
                let a = falling(x);
                let b = rising((t - self.t_reswitch.unwrap_or(f64::INFINITY)) / self.tau_switch);
                // 1 - (1-a)(1-b), kept in additive form for accuracy near zero
                self.omega0 * (a + b - a * b)
            }
            PulseShape::PiecewiseLinear(knots) => interpolate(knots, t).0,
        }
    }

    /// dOmega/dt, rad/s^2.
    pub fn omega_rate(&self, t: f64) -> f64 {
        let x = (t - self.t_switch) / self.tau_switch;
        // d/dx falling(x) = -2 falling(x) falling(-x); the second factor is
        // not formed as 1 - falling(x), which loses digits before the switch
        let dfall = |x: f64| -2.0 * falling(x) * rising(x);
        match &self.shape {
            PulseShape::Constant => 0.0,
            PulseShape::TanhOff => self.omega0 * dfall(x) / self.tau_switch,
            PulseShape::TanhOn => -self.omega0 * dfall(-x) / self.tau_switch,
            PulseShape::OffThenOn => {
                let xr = (t - self.t_reswitch.unwrap_or(f64::INFINITY)) / self.tau_switch;
                let a = falling(x);
                let b = rising(xr);
                let da = dfall(x) / self.tau_switch;
                let db = -dfall(-xr) / self.tau_switch;
                self.omega0 * (da * (1.0 - b) + db * (1.0 - a))
            }
            PulseShape::PiecewiseLinear(knots) => interpolate(knots, t).1,
        }
    }

    /// dOmega/dt / Omega, evaluated without forming the ratio of two tiny
    /// numbers for the switch shapes. NaN where Omega = 0 with nonzero slope.
    pub fn omega_log_rate(&self, t: f64) -> f64 {
        let x = (t - self.t_switch) / self.tau_switch;
        match &self.shape {
            PulseShape::Constant => 0.0,
            PulseShape::TanhOff => -2.0 * rising(x) / self.tau_switch,
            PulseShape::TanhOn => 2.0 * falling(x) / self.tau_switch,
            _ => {
                let w = self.omega_at(t);
                let wd = self.omega_rate(t);
                if wd == 0.0 {
                    0.0
                } else {
                    wd / w
                }
            }
        }
    }

    /// True when Omega never increases.
    pub fn is_monotone_off(&self) -> bool {
        match &self.shape {
            PulseShape::Constant | PulseShape::TanhOff => true,
            PulseShape::TanhOn | PulseShape::OffThenOn => false,
            PulseShape::PiecewiseLinear(k) => k.windows(2).all(|w| w[1].1 <= w[0].1),
        }
    }

    /// Smallest time scale on which Omega changes (infinite for constant).
    pub fn switch_time_scale(&self) -> f64 {
        match &self.shape {
            PulseShape::Constant => f64::INFINITY,
            PulseShape::TanhOff | PulseShape::TanhOn | PulseShape::OffThenOn => self.tau_switch,
            PulseShape::PiecewiseLinear(k) => k
                .windows(2)
                .map(|w| w[1].0 - w[0].0)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Interior points where the schedule is not smooth; quadrature splits there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            PulseShape::PiecewiseLinear(k) => k.iter().map(|k| k.0).collect(),
            PulseShape::Constant => Vec::new(),
            PulseShape::TanhOff | PulseShape::TanhOn => vec![self.t_switch],
            PulseShape::OffThenOn => {
                let mut v = vec![self.t_switch];
                v.extend(self.t_reswitch);
                v
            }
        }
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> (f64, f64) {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if t < first.0 {
        return (first.1, 0.0);
    }
    if t >= last.0 {
        return (last.1, 0.0);
    }
    let i = knots.partition_point(|k| k.0 <= t) - 1;
    let (t0, w0) = knots[i];
    let (t1, w1) = knots[i + 1];
    let slope = (w1 - w0) / (t1 - t0);
    (w0 + slope * (t - t0), slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn switch_rate_keeps_precision_before_the_switch() {
        let s = PulseSchedule::tanh_off(2.0, 0.0, 1.0);
        // far before the switch, dOmega/dt = -Omega0 sech^2(x)/2 ~ -2 Omega0 exp(2x)
        let x = -12.0f64;
        let exact = -2.0 * 2.0 * (2.0 * x).exp() / (1.0 + (2.0 * x).exp()).powi(2);
        assert_relative_eq!(s.omega_rate(x), exact, max_relative = 1e-13);
        assert_relative_eq!(s.omega_log_rate(x), exact / s.omega_at(x), max_relative = 1e-13);
    }

    #[test]
    fn constant_shape_is_flat() {
        let s = PulseSchedule::constant(1.5e8);
        for t in [-1.0, 0.0, 3.3e-6, 1e9] {
            assert_eq!(s.omega_at(t), 1.5e8);
            assert_eq!(s.omega_rate(t), 0.0);
        }
    }

    #[test]
    fn tanh_off_midpoint_and_tail() {
        let s = PulseSchedule::tanh_off(2.0, 1.0e-6, 2.0e-7);
        assert_relative_eq!(s.omega_at(1.0e-6), 1.0, max_relative = 1e-15);
        // 2 (1 - tanh 10)/2 = 1 - tanh 10
        let expected = 4.122307e-9;
        let got = s.omega_at(1.0e-6 + 10.0 * 2.0e-7);
        assert_relative_eq!(got, expected, max_relative = 1e-6);
    }

    #[test]
    fn tanh_off_stays_positive_far_out() {
        let s = PulseSchedule::tanh_off(1.0, 0.0, 1.0);
        let w = s.omega_at(100.0);
        assert!(w > 0.0 && w < 1e-80);
        assert!(s.omega_rate(100.0) < 0.0);
    }

    #[test]
    fn rate_matches_finite_difference() {
        let shapes = [
            PulseSchedule::tanh_off(3.0, 0.5, 0.2),
            PulseSchedule::tanh_on(3.0, 0.5, 0.2),
            PulseSchedule::off_then_on(3.0, 0.5, 1.5, 0.2),
        ];
        for s in &shapes {
            for t in [0.1, 0.45, 0.5, 0.8, 1.4, 2.0] {
                let h = 1e-6;
                let fd = (s.omega_at(t + h) - s.omega_at(t - h)) / (2.0 * h);
                assert_relative_eq!(s.omega_rate(t), fd, epsilon = 1e-8, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn log_rate_consistent_with_ratio() {
        let s = PulseSchedule::tanh_off(3.0, 0.5, 0.2);
        for t in [0.0, 0.5, 1.3] {
            assert_relative_eq!(s.omega_log_rate(t), s.omega_rate(t) / s.omega_at(t), max_relative = 1e-12);
        }
        assert_relative_eq!(s.omega_log_rate(500.0), -10.0, max_relative = 1e-12);
    }

    #[test]
    fn off_then_on_returns_to_peak() {
        let s = PulseSchedule::off_then_on(2.0, 1.0, 5.0, 0.1);
        assert_relative_eq!(s.omega_at(-3.0), 2.0, max_relative = 1e-12);
        assert!(s.omega_at(3.0) < 1e-15);
        assert_relative_eq!(s.omega_at(9.0), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn piecewise_linear_interpolates_and_holds() {
        let s = PulseSchedule::piecewise_linear(vec![(0.0, 4.0), (1.0, 2.0), (3.0, 0.0)]);
        assert_eq!(s.omega_at(-1.0), 4.0);
        assert_eq!(s.omega_at(0.5), 3.0);
        assert_eq!(s.omega_at(2.0), 1.0);
        assert_eq!(s.omega_at(7.0), 0.0);
        assert_eq!(s.omega_rate(0.5), -2.0);
        assert!(s.is_monotone_off());
        assert!(s.validate().is_ok());
        let bad = PulseSchedule::piecewise_linear(vec![(1.0, 1.0), (1.0, 2.0)]);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rejects_bad_switch_width() {
        assert!(PulseSchedule::tanh_off(1.0, 0.0, 0.0).validate().is_err());
        assert!(PulseSchedule::off_then_on(1.0, 2.0, 1.0, 0.1).validate().is_err());
        assert!(PulseSchedule::constant(-1.0).validate().is_err());
    }

    proptest! {
        #[test]
        fn tanh_off_monotone_and_bounded(t1 in -50.0f64..50.0, dt in 0.0f64..20.0, tau in 0.01f64..5.0) {
            let s = PulseSchedule::tanh_off(7.0, 1.0, tau);
            let a = s.omega_at(t1);
            let b = s.omega_at(t1 + dt);
            prop_assert!(b <= a);
            prop_assert!((0.0..=7.0).contains(&a));
            prop_assert!(s.omega_rate(t1).abs() <= 7.0 / (2.0 * tau) * (1.0 + 1e-12));
        }

        #[test]
        fn tanh_on_monotone(t1 in -50.0f64..50.0, dt in 0.0f64..20.0, tau in 0.01f64..5.0) {
            let s = PulseSchedule::tanh_on(7.0, -2.0, tau);
            prop_assert!(s.omega_at(t1 + dt) >= s.omega_at(t1));
            prop_assert!(s.omega_rate(t1).abs() <= 7.0 / (2.0 * tau) * (1.0 + 1e-12));
        }
    }
}
