//! Experiment harness for `chaoskit-core`: parallel Monte Carlo drivers,
//! kernel and expansion file formats, experiment configuration, the four
//! decoupling experiments and report serialization.

pub mod config;
pub mod error;
pub mod experiments;
pub mod format;
pub mod parallel;
pub mod report;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat};
pub use error::{HarnessError, Result};
pub use experiments::run;
pub use report::ExperimentReport;
