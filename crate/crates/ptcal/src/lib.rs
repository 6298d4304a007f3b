//! Command-line front end for `ptcal-core`: CSV score files, JSON reports
//! and model files, and the `ptcal` subcommands.

pub mod cli;
pub mod csv_io;
pub mod report;

pub use cli::{execute, main_with_args, render, Command};
pub use csv_io::{load_csv, parse_csv, write_csv, CsvError};
pub use report::{RunConfig, RunHeader, SCHEMA_VERSION};
