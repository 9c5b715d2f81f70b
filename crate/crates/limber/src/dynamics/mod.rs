//! Whole-body dynamics built on one recursive Newton-Euler kernel.
//!
//! The generalized-force layout matches the system-velocity layout: the
//! first six rows pair with the base velocity (net force, then net moment
//! about the base origin in world axes), the remaining `n` rows are joint
//! torques. External wrenches passed to [`rnea`] are expressed in the frame
//! of the link they act on.

mod centroidal;
mod contacts;
mod matrices;
mod momentum;
mod rnea;
mod sim;

pub use centroidal::{centroidal_transform, CentroidalDecomposition};
pub use contacts::{
    constraint_matrices, point_jacobian, point_jacobian_dot, ContactPoint, ContactSet,
};
pub use matrices::{bias_forces, forward_dynamics, mass_matrix, rnea_generalized};
pub use momentum::{
    center_of_mass, com_acceleration_from, com_velocity, momentum_rate, momentum_rate_balance,
    total_momentum, wrench_to_centroidal,
};
pub use rnea::{
    proper_accelerations, rnea, rnea_joint_wrenches, Acceleration, BodyKinematics, RneaResult,
};
pub use sim::{
    integrate_constrained, integrate_free, BaumgarteGains, ConstrainedStep, SimState,
    STANDARD_GRAVITY,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("KKT system is singular: {0}")]
    SingularKkt(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
