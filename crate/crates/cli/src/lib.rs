//! Orchestration for the `mcsel` command: configuration, the pipeline stages and their file
//! formats.

pub mod config;
pub mod error;
pub mod pipeline;

pub use config::{ExperimentConfig, Overrides};
pub use error::CliError;
