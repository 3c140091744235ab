//! Physical parameters of the atom-molecule-light system and the
//! collective quantities derived from them.
//!
//! All quantities are SI. The condensate is taken to be uniform, so the
//! linear density is always `n_atoms / length` and is never stored.

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Reduced atom-field coupling g~ = g n^{1/2} N^{-1/2}, s^-1.
    pub g_tilde: f64,
    /// Atom number N in the interaction region.
    pub n_atoms: f64,
    /// Quantization (medium) length L, m.
    pub length: f64,
    pub c_light: f64,
    /// Two-photon detuning, rad/s.
    pub delta: f64,
    /// One-photon detuning, rad/s.
    pub big_delta: f64,
    pub gamma_b: f64,
    pub gamma_e: f64,
    pub gamma_c: f64,
}

/// Transversal decay rates and the collective coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub gamma_bc: f64,
    pub gamma_be: f64,
    /// Collective coupling G = g~ N, s^-1.
    pub coupling: f64,
}

/// Detuning magnitudes that break the small-detuning assumption of the
/// lossy adiabatic solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetuningWarning {
    TwoPhotonVsGammaBc { ratio: f64 },
    TwoPhotonVsGammaBe { ratio: f64 },
    OnePhotonVsGammaBe { ratio: f64 },
}

impl Default for PhysicalParams {
    /// Typical weak-association values: gamma_be = 2e7, gamma_bc = 5e3,
    /// N = 3e6, g~ = 50 s^-1.
    fn default() -> Self {
        Self {
            g_tilde: 50.0,
            n_atoms: 3.0e6,
            length: 1.0e-4,
            c_light: 3.0e8,
            delta: 0.0,
            big_delta: 0.0,
            gamma_b: 0.0,
            gamma_e: 2.0e7,
            gamma_c: 5.0e3,
        }
    }
}

impl PhysicalParams {
    /// Parameters with every decay and detuning switched off.
    pub fn lossless(g_tilde: f64, n_atoms: f64, length: f64, c_light: f64) -> Self {
        Self {
            g_tilde,
            n_atoms,
            length,
            c_light,
            delta: 0.0,
            big_delta: 0.0,
            gamma_b: 0.0,
            gamma_e: 0.0,
            gamma_c: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("g_tilde", self.g_tilde),
            ("n_atoms", self.n_atoms),
            ("length", self.length),
            ("c_light", self.c_light),
            ("delta", self.delta),
            ("Delta", self.big_delta),
            ("gamma_b", self.gamma_b),
            ("gamma_e", self.gamma_e),
            ("gamma_c", self.gamma_c),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        for (name, v) in [
            ("gamma_b", self.gamma_b),
            ("gamma_e", self.gamma_e),
            ("gamma_c", self.gamma_c),
            ("g_tilde", self.g_tilde),
        ] {
            if v < 0.0 {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("n_atoms", self.n_atoms),
            ("length", self.length),
            ("c_light", self.c_light),
        ] {
            if v <= 0.0 {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Linear condensate density n = N / L, atoms per metre.
    pub fn density(&self) -> f64 {
        self.n_atoms / self.length
    }

    pub fn gamma_bc(&self) -> f64 {
        2.0 * self.gamma_b + self.gamma_c
    }

    pub fn gamma_be(&self) -> f64 {
        2.0 * self.gamma_b + self.gamma_e
    }

    /// Product gamma_be * gamma_bc, the loss scale that competes with Omega^2.
    pub fn loss_product(&self) -> f64 {
        self.gamma_be() * self.gamma_bc()
    }

    /// Collective coupling G = g~ N.
    pub fn coupling(&self) -> f64 {
        self.g_tilde * self.n_atoms
    }

    /// Bare coupling g = g~ sqrt(L) (units s^-1 m^1/2).
    pub fn bare_coupling(&self) -> f64 {
        self.g_tilde * self.length.sqrt()
    }

    pub fn derived_rates(&self) -> DerivedRates {
        DerivedRates {
            gamma_bc: self.gamma_bc(),
            gamma_be: self.gamma_be(),
            coupling: self.coupling(),
        }
    }

    /// Checks delta^2 << gamma_bc^2 and delta^2, Delta^2 << gamma_be^2.
    /// A ratio above 0.1 counts as a violation.
    pub fn detuning_warnings(&self) -> Vec<DetuningWarning> {
        const LIMIT: f64 = 0.1;
        let mut out = Vec::new();
        let ratio = |det: f64, rate: f64| {
            if det == 0.0 {
                0.0
            } else if rate == 0.0 {
                f64::INFINITY
            } else {
                (det / rate).powi(2)
            }
        };
        let r = ratio(self.delta, self.gamma_bc());
        if r > LIMIT {
            out.push(DetuningWarning::TwoPhotonVsGammaBc { ratio: r });
        }
        let r = ratio(self.delta, self.gamma_be());
        if r > LIMIT {
            out.push(DetuningWarning::TwoPhotonVsGammaBe { ratio: r });
        }
        let r = ratio(self.big_delta, self.gamma_be());
        if r > LIMIT {
            out.push(DetuningWarning::OnePhotonVsGammaBe { ratio: r });
        }
        out
    }
}
