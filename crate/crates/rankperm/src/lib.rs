//! File formats, parallel drivers and the command-line interface around
//! [`rankperm_core`].

pub mod cli;
pub mod error;
pub mod io;
pub mod parallel;
pub mod report;

pub use error::{CliError, CliResult};
