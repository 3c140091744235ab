//! Configuration, subcommands and file output for the `photomol` tool.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{
    cmd_analytic, cmd_compare, cmd_estimates, cmd_simulate, cmd_sweep, compare_with_analytic, estimates,
    run_simulation, velocity_scaling_slope, CompareOutcome, EstimateRow, RunOptions, SimulateOutcome, SweepRow,
};
pub use config::{RawConfig, ScenarioConfig, SweepAxis, SweepMode, SweepScale};
