//! Experiment driver for `gmch-core`: configuration, the `gmch` subcommands
//! and the on-disk formats (CSV, gnuplot columns, JSON, binary frames).

pub mod certify;
pub mod config;
pub mod error;
pub mod io;
pub mod simulate;
pub mod stability;
pub mod weakres;

pub use config::{ExperimentConfig, Overrides};
pub use error::LabError;
