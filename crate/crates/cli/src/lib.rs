//! Library side of the `ccch` command: configuration parsing and dispatch.

pub mod config;
pub mod run;

pub use config::{parse_config, Command, ConfigError, RunConfig};
pub use run::{dispatch, exit_code, RunError, RunReport, EXIT_BLOWUP, EXIT_FAIL, EXIT_IO, EXIT_OK};
