//! Command-line front end for `openxxz-core`: configuration, subcommands
//! and CSV/JSON reports.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_classify, cmd_energies, cmd_spectrum, cmd_verify};
pub use config::{ConfigError, Format, RunConfig};
pub use output::{Cell, Report};
