//! Command-line front end: scenario files, sweeps, curve output and checks.

// `!(x > y)` rejects NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod error;
pub mod labels;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::LoadedConfig;
pub use error::{CliError, CliResult};
