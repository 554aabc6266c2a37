//! Configuration, file formats and subcommands of the `nvsteady` tool.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod commands;
pub mod config;
pub mod error;
pub mod orbits;
pub mod output;
pub mod pipeline;
pub mod profile_csv;
pub mod summary;

pub use config::{parse_config, serialize_config, RunConfig};
pub use error::{CliError, CliResult};
