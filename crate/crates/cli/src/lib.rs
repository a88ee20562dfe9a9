//! File formats and subcommands behind the `ptower` binary.

pub mod commands;
pub mod schema;

pub use commands::{CliError, Format, Outcome};
pub use schema::InstanceFile;
