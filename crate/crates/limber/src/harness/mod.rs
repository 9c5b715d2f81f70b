//! Batch scenario harness: configuration, synthetic data generation,
//! pipeline execution and report emission.

pub mod models;

mod config;
mod csvio;
mod report;
mod rmse;
mod scenario;
mod synth;

pub use config::{ScenarioConfig, ScenarioKind};
pub use csvio::{format_float, CsvWriter};
pub use report::{ChannelRmse, Report, ToleranceCheck};
pub use rmse::compute_rmse;
pub use scenario::{run_experiment, validate_model_file};
pub use synth::{synthesize_sensors, JointTrajectory, SensorStreams};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("pipeline error in stage '{stage}': {message}")]
    Pipeline { stage: String, message: String },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn stage(stage: &str, err: impl std::fmt::Display) -> Self {
        HarnessError::Pipeline {
            stage: stage.to_string(),
            message: err.to_string(),
        }
    }
}
