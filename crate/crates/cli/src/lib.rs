//! Command-line front end: job files, field presets and the subcommands
//! behind the `tetcut` binary.

pub mod commands;
pub mod error;
pub mod job;

pub use error::CliError;
pub use job::{FieldSource, JobSpec, LatticeSpec, OutputTargets, Preset, SCHEMA_VERSION};
