//! Configuration, presets and output plumbing behind the `heatgrow` binary.

pub mod config;
pub mod error;
pub mod presets;
pub mod scenario;
pub mod sweep;

pub use config::RunConfig;
pub use error::CliError;
