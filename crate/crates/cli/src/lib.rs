//! Command-line front-end: single pairings, batches, verification suites and the result cache.

pub mod cache;
pub mod cli;
pub mod error;
pub mod request;
pub mod run;
pub mod verify;

pub use cli::run_cli;
pub use error::{CliError, Result};
