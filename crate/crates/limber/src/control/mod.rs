//! Interaction-aware control algebra.
//!
//! Everything here is pure except the small controller state structs that
//! the simulation loop advances (advancement state, integral errors).

mod advancement;
mod coupled;
mod feedback;
mod momentum_ctl;
mod partner;
mod point_mass;
mod projection;
mod trajectory;

pub use advancement::{advancement_update, AdvancementState};
pub use coupled::{
    coupled_constrained_dynamics, coupled_wrench_map, split_wrenches, AgentState, CoupledSystem,
    MutualContact, MutualKind, WrenchMap,
};
pub use feedback::{
    feedback_linearization_torques, task_jacobian, task_jacobian_dot, FeedbackLinearization,
    TaskDefinition, TaskRows,
};
pub use momentum_ctl::{momentum_balance_wrench, momentum_torques, MomentumTorques};
pub use partner::{partner_aware_torques, PartnerAwareGains, PartnerAwareResult};
pub use point_mass::{lyapunov_rate, lyapunov_value, point_mass_step, PointMassState};
pub use projection::{
    alpha_projection, updated_desired_dynamics, HelpfulnessConvention, WrenchDecomposition,
    ALPHA_DEADZONE,
};
pub use trajectory::{LineTrajectory, MinimumJerkTrajectory, SinusoidTrajectory, Trajectory};

use thiserror::Error;

/// Relative singular-value threshold for pseudoinverses.
pub const PINV_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ControlError {
    #[error("task map is rank deficient")]
    RankDeficientTask,
    #[error("coupled wrench map is singular")]
    SingularGamma,
    #[error("projection direction is degenerate")]
    DegenerateDirection,
    #[error("trajectory tangent is degenerate")]
    DegenerateTangent,
    #[error("base jacobian block is singular")]
    SingularBaseJacobian,
    #[error("rank deficient operator")]
    RankDeficient,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
