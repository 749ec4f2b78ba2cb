//! Configuration loading, run orchestration and output formats for the
//! `string-pendulum` command.

pub mod config;
pub mod output;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, Integrator, RunConfig};
pub use output::{parse_snapshot, read_series, SeriesRow, Snapshot};
pub use run::{run, RunSummary};
