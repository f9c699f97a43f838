//! File formats and commands behind the `specdist` binary.

pub mod commands;
pub mod error;
pub mod gen;
pub mod io;

pub use commands::Outcome;
pub use error::CliError;
