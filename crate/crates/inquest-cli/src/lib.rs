//! File formats, HTTP verifier client, workspace management and the
//! command implementations behind the `inquest` binary.

pub mod commands;
pub mod config;
pub mod endpoint;
pub mod error;
pub mod io;
pub mod workspace;

pub use config::RunConfig;
pub use error::CliError;
