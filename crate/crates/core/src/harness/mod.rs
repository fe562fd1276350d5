//! Configuration, experiment runners, data output and the command line.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod series;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::{run, RunSummary};
pub use series::DataSeries;
