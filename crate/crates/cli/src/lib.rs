//! Experiment runner: reads a TOML [`ExperimentSpec`], computes the requested
//! tables with the `jtcran` models and writes them as CSV next to a
//! manifest that records the fully defaulted spec, seed, version, wall time
//! and numerical diagnostics.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, ExperimentKind, ExperimentSpec};
pub use error::{CliError, Result};
pub use run::{compute, determinism_check, execute};
