//! Command-line front end for the junction solver laboratory: JSON config
//! parsing ([`config`]) and subcommand dispatch with a fixed exit-code
//! contract ([`dispatch`]).

pub mod config;
pub mod dispatch;

pub use config::{parse_config, serialize_config, ConfigError, RunConfig};
pub use dispatch::{run, Cli, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK};
