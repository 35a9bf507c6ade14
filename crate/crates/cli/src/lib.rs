//! Configuration and execution of reproducible star-graph experiments.

pub mod config;
pub mod run;

pub use config::{parse_config, Command, ConfigError, RawConfig, RunConfig};
pub use run::{run, FileRecord, RunError, RunManifest};
