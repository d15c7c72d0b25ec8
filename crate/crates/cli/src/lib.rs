//! File formats, archives and subcommands behind the `po` binary.

pub mod archive;
pub mod commands;
pub mod csv_io;
pub mod error;
pub mod report;
pub mod schema;

pub use error::{CliError, Result};
