//! Configuration, orchestration and output for `mmshare` runs.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, Settings};
pub use emit::{emit, Format};
pub use run::{run, Mode, ResultRecord, RunConfig};
