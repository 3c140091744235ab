//! Nonlinear mean-field solver with condensate depletion.
//!
//! Amplitudes are scaled so that the undepleted limit reproduces the
//! linearized variables: b = phi_b / sqrt(n), m_e = sqrt(L) phi_e,
//! m_c = sqrt(L) phi_c. Then
//!
//! ```text
//! d/dt b   = (i delta - gamma_b) b + 2 i (G/N) e* b* m_e
//! d/dt m_e = -(gamma_e + i Delta) m_e + i G e b^2 + i Omega m_c
//! d/dt m_c = -gamma_c m_c + i Omega m_e
//! de/dz    = i (G/c) b*^2 m_e
//! ```
//!
//! and the composites p = b*^2 m_e, s = b*^2 m_c obey the linearized
//! equations when |b| = 1. Atom number is int |b|^2 + (2/N) int (|m_e|^2 + |m_c|^2),
//! in units of the initial atom density times length.

use num_complex::Complex64;

use crate::envelope::EnvelopeFn;
use crate::error::{Error, Result};
use crate::grid::{Frame, Grid1D};
use crate::mb::{check_growth, check_inputs, units_for, Balance, FieldState, History, SolverOptions, I, ZERO};
use crate::params::PhysicalParams;
use crate::rk4::Rk4;
use crate::schedule::PulseSchedule;

/// Relative L2 difference above which the linearized solver is considered
/// to have broken down.
pub const WEAK_EXCITATION_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldState {
    pub t: f64,
    pub phi_b: Vec<Complex64>,
    pub phi_e: Vec<Complex64>,
    pub phi_c: Vec<Complex64>,
    pub e: Vec<Complex64>,
}

impl MeanFieldState {
    /// Uniform condensate, no molecules, no light.
    pub fn ground(n: usize) -> Self {
        Self {
            t: 0.0,
            phi_b: vec![Complex64::new(1.0, 0.0); n],
            phi_e: vec![ZERO; n],
            phi_c: vec![ZERO; n],
            e: vec![ZERO; n],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldDerivatives {
    pub dphi_b: Vec<Complex64>,
    pub dphi_e: Vec<Complex64>,
    pub dphi_c: Vec<Complex64>,
    pub de_dz: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy)]
struct Rates {
    coupling: f64,
    depletion: f64,
    delta: f64,
    big_delta: f64,
    gamma_b: f64,
    gamma_e: f64,
    gamma_c: f64,
}

impl Rates {
    fn new(params: &PhysicalParams, scale: f64) -> Self {
        let g = params.coupling() * scale;
        Self {
            coupling: g,
            depletion: 2.0 * g / params.n_atoms,
            delta: params.delta * scale,
            big_delta: params.big_delta * scale,
            gamma_b: params.gamma_b * scale,
            gamma_e: params.gamma_e * scale,
            gamma_c: params.gamma_c * scale,
        }
    }

    #[inline]
    fn cell(&self, e: Complex64, b: Complex64, me: Complex64, mc: Complex64, omega: f64) -> [Complex64; 3] {
        let db = Complex64::new(-self.gamma_b, self.delta) * b + I * self.depletion * e.conj() * b.conj() * me;
        let dme = -Complex64::new(self.gamma_e, self.big_delta) * me + I * (self.coupling * e * b * b + omega * mc);
        let dmc = -self.gamma_c * mc + I * omega * me;
        [db, dme, dmc]
    }
}

/// Pointwise right-hand side in SI rates for a uniform control field.
pub fn nonlinear_rhs(state: &MeanFieldState, params: &PhysicalParams, omega: f64) -> MeanFieldDerivatives {
    let r = Rates::new(params, 1.0);
    let n = state.phi_b.len();
    let mut out = MeanFieldDerivatives {
        dphi_b: vec![ZERO; n],
        dphi_e: vec![ZERO; n],
        dphi_c: vec![ZERO; n],
        de_dz: vec![ZERO; n],
    };
    for j in 0..n {
        let b = state.phi_b[j];
        let [db, dme, dmc] = r.cell(state.e[j], b, state.phi_e[j], state.phi_c[j], omega);
        out.dphi_b[j] = db;
        out.dphi_e[j] = dme;
        out.dphi_c[j] = dmc;
        out.de_dz[j] = I * (r.coupling / params.c_light) * b.conj() * b.conj() * state.phi_e[j];
    }
    out
}

#[derive(Debug, Clone)]
pub struct MeanFieldHistory {
    pub snapshots: Vec<MeanFieldState>,
    /// Field and composites p = b*^2 m_e, s = b*^2 m_c in the linearized
    /// solver's variables. Its balance tracks photons and molecules
    /// (int |m_e|^2 + |m_c|^2 against the boundary fluxes).
    pub composite: History,
    /// Atom number relative to its initial value, at each snapshot.
    pub atom_number: Vec<f64>,
    /// Largest molecules-per-initial-atom over all steps.
    pub molecular_fraction_max: f64,
}

impl MeanFieldHistory {
    pub fn max_atom_residual(&self) -> f64 {
        self.atom_number.iter().map(|a| (a - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Integrates the nonlinear system with the same face-sweep/RK4 scheme as
/// the linearized retarded-frame solver.
pub fn integrate_full(
    params: &PhysicalParams,
    schedule: &PulseSchedule,
    grid: &Grid1D,
    input: &EnvelopeFn,
    opts: &SolverOptions,
) -> Result<MeanFieldHistory> {
    check_inputs(params, schedule, grid, input)?;
    if grid.frame != Frame::Retarded {
        return Err(Error::Config("the mean-field solver runs in the retarded frame only".into()));
    }
    let units = units_for(params, input, opts)?;
    let n = grid.n_z;
    let rates = Rates::new(params, units.t_unit);
    let dz = units.length(grid.dz());
    let gdz = rates.coupling * dz;
    let dt = units.time(grid.dt);
    let length = n as f64 * dz;
    let n_atoms = params.n_atoms;
    let offsets: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * dz).collect();
    let omega = |t: f64| units.rate(schedule.omega_at(units.unscale_time(t)));
    let e_in = |t: f64| input.eval(units.unscale_time(t));
    let (k_in, k_out, k_loss) = (3 * n, 3 * n + 1, 3 * n + 2);

    let mut rhs = |tau: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let ein = e_in(tau);
        let mut face = ein;
        let mut loss = 0.0;
        for j in 0..n {
            let (b, me, mc) = (y[j], y[n + j], y[2 * n + j]);
            let step = I * gdz * b.conj() * b.conj() * me;
            let ebar = face + step * 0.5;
            face += step;
            let [db, dme, dmc] = rates.cell(ebar, b, me, mc, omega(tau + offsets[j]));
            dy[j] = db;
            dy[n + j] = dme;
            dy[2 * n + j] = dmc;
            loss += rates.gamma_e * me.norm_sqr() + rates.gamma_c * mc.norm_sqr();
        }
        dy[k_in] = Complex64::new(ein.norm_sqr(), 0.0);
        dy[k_out] = Complex64::new(face.norm_sqr(), 0.0);
        dy[k_loss] = Complex64::new(2.0 * loss * dz, 0.0);
    };

    let molecules = |y: &[Complex64]| y[n..3 * n].iter().map(|v| v.norm_sqr()).sum::<f64>() * dz;
    let atoms = |y: &[Complex64]| {
        (y[..n].iter().map(|v| v.norm_sqr()).sum::<f64>() * dz + 2.0 * molecules(y) / n_atoms) / length
    };

    let stride = opts.resolve_stride(grid.n_t);
    let mut y = vec![ZERO; 3 * n + 3];
    y[..n].fill(Complex64::new(1.0, 0.0));
    let mut rk = Rk4::new(y.len());
    let mut out = MeanFieldHistory {
        snapshots: Vec::new(),
        composite: History {
            grid: *grid,
            units,
            z: grid.centers(),
            snapshots: Vec::new(),
            balance: Vec::new(),
            e_in: Vec::with_capacity(grid.n_t + 1),
            e_out: Vec::with_capacity(grid.n_t + 1),
        },
        atom_number: Vec::new(),
        molecular_fraction_max: 0.0,
    };

    let record = |out: &mut MeanFieldHistory, y: &[Complex64], k: usize, tau: f64| {
        let t = grid.dt * k as f64;
        let b = y[..n].to_vec();
        let me = y[n..2 * n].to_vec();
        let mc = y[2 * n..3 * n].to_vec();
        let mut face = e_in(tau);
        let mut e = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        let mut s = Vec::with_capacity(n);
        for j in 0..n {
            let b2 = b[j].conj() * b[j].conj();
            let step = I * gdz * b2 * me[j];
            e.push(face + step * 0.5);
            face += step;
            p.push(b2 * me[j]);
            s.push(b2 * mc[j]);
        }
        out.composite.balance.push(Balance {
            t,
            stored: molecules(y),
            influx: y[k_in].re,
            outflux: y[k_out].re,
            loss: y[k_loss].re,
            numerical: 0.0,
        });
        out.composite.snapshots.push(FieldState { t, e: e.clone(), p, s });
        out.atom_number.push(atoms(y));
        out.snapshots.push(MeanFieldState {
            t,
            phi_b: b,
            phi_e: me,
            phi_c: mc,
            e,
        });
    };

    let e0 = e_in(0.0);
    out.composite.e_in.push(e0);
    out.composite.e_out.push(e0);
    record(&mut out, &y, 0, 0.0);
    for k in 0..grid.n_t {
        rk.step(&mut y, k as f64 * dt, dt, &mut rhs);
        let tau1 = (k + 1) as f64 * dt;
        let ein = e_in(tau1);
        let mut face = ein;
        for j in 0..n {
            face += I * gdz * y[j].conj() * y[j].conj() * y[n + j];
        }
        let frac = molecules(&y) / (n_atoms * length);
        if !(frac.is_finite() && face.re.is_finite() && face.im.is_finite() && y[k_loss].re.is_finite()) {
            return Err(Error::NonFinite {
                step: k + 1,
                time: grid.dt * (k + 1) as f64,
                msg: "mean-field state became non-finite".into(),
            });
        }
        out.molecular_fraction_max = out.molecular_fraction_max.max(frac);
        out.composite.e_in.push(ein);
        out.composite.e_out.push(face);
        if (k + 1) % stride == 0 || k + 1 == grid.n_t {
            record(&mut out, &y, k + 1, tau1);
            check_growth(&out.composite.final_balance(), k + 1, grid)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakExcitationComparison {
    /// Relative L2 difference of the field over all common snapshots.
    pub relative_l2: f64,
    pub molecular_fraction_max: f64,
    /// Set when the solvers disagree by more than the tolerance.
    pub breach: bool,
}

/// Compares the nonlinear field history with a linearized run on the same
/// grid and snapshot stride.
pub fn compare_with_linearized(full: &MeanFieldHistory, linear: &History) -> Result<WeakExcitationComparison> {
    let a = &full.composite.snapshots;
    let b = &linear.snapshots;
    if a.len() != b.len() || a.first().map(|s| s.e.len()) != b.first().map(|s| s.e.len()) {
        return Err(Error::Config("histories must share grid and snapshot stride".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.e.iter().zip(&y.e) {
            num += (u - v).norm_sqr();
            den += v.norm_sqr();
        }
    }
    let relative_l2 = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(WeakExcitationComparison {
        relative_l2,
        molecular_fraction_max: full.molecular_fraction_max,
        breach: relative_l2 > WEAK_EXCITATION_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mb::linearized_rhs;

    fn params() -> PhysicalParams {
        PhysicalParams::lossless(50.0, 3.0e6, 180.0, 3.0e8)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ground_state_is_stationary() {
        let d = nonlinear_rhs(&MeanFieldState::ground(4), &params(), 0.0);
        assert!(d
            .dphi_b
            .iter()
            .chain(&d.dphi_e)
            .chain(&d.dphi_c)
            .chain(&d.de_dz)
            .all(|v| v.norm() == 0.0));
    }

    #[test]
    fn atom_number_rate_vanishes_pointwise() {
        let p = params();
        let st = MeanFieldState {
            t: 0.0,
            phi_b: vec![c(0.9, 0.2), c(0.7, -0.5)],
            phi_e: vec![c(3.0, -1.0), c(-0.2, 4.0)],
            phi_c: vec![c(1.0, 2.0), c(0.5, 0.5)],
            e: vec![c(2.0, 0.3), c(-1.0, 1.5)],
        };
        let d = nonlinear_rhs(&st, &p, 7e7);
        for j in 0..2 {
            let rate = 2.0 * (st.phi_b[j].conj() * d.dphi_b[j]).re
                + 2.0 / p.n_atoms
                    * 2.0
                    * ((st.phi_e[j].conj() * d.dphi_e[j]).re + (st.phi_c[j].conj() * d.dphi_c[j]).re);
            let scale = 2.0 * (st.phi_b[j].conj() * d.dphi_b[j]).re.abs();
            assert!(rate.abs() <= 1e-12 * scale, "{rate} vs {scale}");
        }
    }

    #[test]
    fn small_field_matches_linearized_to_first_order() {
        let p = PhysicalParams {
            delta: 1e3,
            big_delta: 2e5,
            gamma_b: 3.0,
            gamma_e: 2e7,
            gamma_c: 5e3,
            ..params()
        };
        let omega = 4e7;
        // composite rate for p = b*^2 m_e evaluated from the nonlinear rates
        let composite_error = |eps: f64| {
            let b = c(1.0, 0.0);
            let me = c(0.4, 0.1) * eps;
            let mc = c(-0.3, 0.2) * eps;
            let e = c(1.0, -0.5) * eps;
            let st = MeanFieldState {
                t: 0.0,
                phi_b: vec![b],
                phi_e: vec![me],
                phi_c: vec![mc],
                e: vec![e],
            };
            let d = nonlinear_rhs(&st, &p, omega);
            let dp = 2.0 * b.conj() * d.dphi_b[0].conj() * me + b.conj() * b.conj() * d.dphi_e[0];
            let lin = linearized_rhs(
                &FieldState {
                    t: 0.0,
                    e: vec![e],
                    p: vec![me],
                    s: vec![mc],
                },
                &p,
                omega,
            );
            (dp - lin.dp_dt[0]).norm() / lin.dp_dt[0].norm()
        };
        let (r1, r2) = (composite_error(1e-2), composite_error(5e-3));
        assert!(r1 < 1e-6);
        // depletion enters at second order in the amplitude
        assert!((r1 / r2 - 4.0).abs() < 0.05, "{r1} {r2}");
    }

    #[test]
    fn zero_input_keeps_static_condensate() {
        let p = params();
        let s = PulseSchedule::constant(p.coupling());
        let input = EnvelopeFn::gaussian(5e-7, 1e-7, 0.0);
        let grid = Grid1D {
            z_min: 0.0,
            z_max: 15.0,
            n_z: 32,
            dt: 1e-9,
            n_t: 200,
            frame: Frame::Retarded,
        };
        let h = integrate_full(&p, &s, &grid, &input, &SolverOptions::default()).unwrap();
        assert_eq!(h.molecular_fraction_max, 0.0);
        assert!(h.snapshots.iter().all(|st| st.phi_b.iter().all(|b| *b == c(1.0, 0.0))));
    }

    #[test]
    fn lab_frame_is_rejected() {
        let p = params();
        let s = PulseSchedule::constant(p.coupling());
        let input = EnvelopeFn::gaussian(5e-7, 1e-7, 1.0);
        let grid = Grid1D {
            z_min: 0.0,
            z_max: 15.0,
            n_z: 32,
            dt: 1e-9,
            n_t: 10,
            frame: Frame::Lab,
        };
        assert!(integrate_full(&p, &s, &grid, &input, &SolverOptions::default()).is_err());
    }
}
