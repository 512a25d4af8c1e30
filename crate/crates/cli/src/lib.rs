//! Command-line front end: JSON configs in, CSV or JSON curve data out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::CliError;
