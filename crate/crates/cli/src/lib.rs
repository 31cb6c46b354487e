//! Command-line surface of the verifier: configuration, suites, JSON
//! reports and the bundle cache.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod suites;

pub use error::{CliError, CliResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
