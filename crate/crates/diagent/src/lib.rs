//! Configuration, table formats and command-line plumbing around
//! `diagent-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod sweep;
pub mod tsv;

pub use config::Config;
pub use error::CliError;
