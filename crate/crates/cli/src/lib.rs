//! Library surface of the `spinqpt` command-line runner: configuration
//! parsing, orchestration, shot sampling, and output emission. Split from
//! the binary so integration tests can drive runs in-process.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
pub mod shots;

pub use config::{validate_config, ExperimentConfig, MetricsConfig};
pub use error::CliError;
pub use output::RunManifest;
pub use runner::run;
pub use shots::sample_shots;
