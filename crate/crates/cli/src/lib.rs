//! Experiment driver for the fractional stability toolkit: configuration
//! loading, parallel solves, CSV/SVG output, lemma certificates and
//! stability reports.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod report;
pub mod run;
pub mod svg;

pub use config::{ExperimentConfig, FunctionalKind, ModelKind, ModelParams, OrderSpec, Outputs};
pub use error::{CliError, CliResult};
pub use report::{build_report, StabilityReport};
