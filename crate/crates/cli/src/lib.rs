//! Command-line front end for the bicycle-geometry verification pipelines.

pub mod args;
pub mod commands;
pub mod config;
pub mod curve_arg;
pub mod error;
pub mod export;
pub mod output;
pub mod selftest;

pub use config::{Command, Format, RunConfig};
pub use error::CliError;
