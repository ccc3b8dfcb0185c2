//! Command implementations behind the `wehnet` binary.

pub mod commands;
pub mod error;
pub mod input;

pub use commands::{analytic, optimal, optimal_json, sweep, validate, SweepMode, SweepSimulation, ValidationTable};
pub use error::CliError;
pub use input::{load_config, load_sweep, SweepSpec, SweepVariable};
