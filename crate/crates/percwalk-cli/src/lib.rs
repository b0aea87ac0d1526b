//! Batch front-end for the percolation-walk experiments: configuration
//! parsing, pipeline orchestration, persistence and report emission.

pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod parallel;
pub mod pipeline;
pub mod report;
pub mod summary;

pub use config::{parse_config, ExperimentConfig, Stage};
pub use error::CliError;
pub use manifest::RunManifest;
pub use pipeline::run_pipeline;
pub use report::EstimateReport;
pub use summary::report_summary;
