//! Batch driver: configuration, image enumeration, parallel evaluation and
//! CSV output.

pub mod batch;
pub mod config;
pub mod csv;

pub use batch::{run_batch, BatchError, BatchSummary};
pub use config::{parse_config, Command, ConfigError, FailPolicy, RunConfig};
