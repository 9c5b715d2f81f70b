//! Stochastic whole-body dynamics estimation.
//!
//! The dynamics are rewritten as linear constraints `D(q, nu) d + b_D = 0`
//! on a stacked vector `d` of per-link proper accelerations and external
//! wrenches plus per-joint wrenches and accelerations. Sensors contribute a
//! linear measurement equation `Y d + b_Y = y`, and the posterior of the
//! jointly Gaussian system is computed in closed form; its mean is the MAP
//! estimate.
//!
//! All link-indexed quantities in `d` live in link frames: the proper
//! acceleration is what an IMU on the link reports, and wrench sensors are
//! identity selectors on the external-wrench blocks.

mod constraints;
mod effort;
mod map;
mod measurements;
mod sot;
mod variables;

pub use constraints::{build_constraint_model, ConstraintModel};
pub use effort::{joint_effort, joint_torques_from};
pub use map::{
    check_rank, map_estimate, GaussianPrior, MapResult, RankDiagnostic, DEFAULT_MODEL_COVARIANCE,
    DEFAULT_PRIOR_COVARIANCE,
};
pub use measurements::{
    build_measurement_model, momentum_rate_measurement, MeasurementModel, Sensor, SensorSpec,
};
pub use sot::{stack_of_tasks_estimate, SotCovariances, SotProblem, SotResult};
pub use variables::{ground_truth_variables, VariableLayout};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("unknown frame '{0}'")]
    UnknownFrame(String),
    #[error("normal equations are singular")]
    SingularNormalEquations,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
