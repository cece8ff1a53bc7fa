//! Configuration, command dispatch and report emission for the `tau` binary.

mod commands;
mod config;
mod report;

pub use commands::{fit_through_origin, run_command, UnknownCommand, COMMANDS};
pub use config::{load_config, ConfigError, RunConfig};
pub use report::{fmt_f64, json_complex, json_f64, Cell, ColumnKind, RunReport, Status, Table};
