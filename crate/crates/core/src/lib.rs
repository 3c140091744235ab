//! Light-to-molecule quantum state transfer in a photoassociating
//! condensate: adiabatic transfer kernel, linearized and mean-field
//! Maxwell-Bloch solvers, transfer-channel figures of merit and a
//! scenario runner.

pub mod analytic;
pub mod channel;
pub mod envelope;
pub mod error;
pub mod grid;
pub mod mb;
pub mod meanfield;
pub mod params;
pub mod quadrature;
mod rk4;
pub mod scenario;
pub mod schedule;
pub mod units;

pub use error::{Error, Result};
