//! Forward kinematics, frame Jacobians and motion-tracking inverse
//! kinematics for floating-base trees.
//!
//! Velocities use the mixed convention throughout: the linear part is the
//! world-frame velocity of the frame origin and the angular part is the
//! world-frame angular velocity. The stacked system velocity is
//! `[base linear, base angular, joint rates]` with dimension n + 6.

mod fk;
mod ik;
mod jacobian;
mod retarget;
mod state;
mod targets;

pub use fk::{forward_kinematics, link_velocities};
pub use ik::{
    dynamical_ik_step, instantaneous_ik, DampingPolicy, IkOptions, IkSolution, IkState,
};
pub use jacobian::{frame_bias_acceleration, frame_jacobian, frame_jacobian_dot};
pub use retarget::retarget_orientation;
pub use state::{Configuration, Velocity};
pub use targets::{parse_target_csv, Target, TargetSet};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("jacobian is singular and damping is disabled")]
    SingularJacobian,
    #[error("unknown frame '{0}'")]
    UnknownFrame(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
