//! Coordinate-free 3D/6D spatial algebra.
//!
//! Conventions used across the crate:
//! - 6D motion vectors stack the linear part first, then the angular part.
//! - 6D force vectors stack the force first, then the moment.
//! - A [`Pose`] written `a_h_b` is the pose of frame B expressed in frame A;
//!   it maps B-coordinates of a point to A-coordinates.
//! - [`adjoint_motion`]`(a_h_b)` re-expresses motion vectors from A to B, and
//!   [`adjoint_force`]`(a_h_b)` does the same for force vectors, so the
//!   duality pairing `<motion, force>` is invariant under the paired maps.

mod inertia;
mod ops;
mod pose;
mod rotation;
mod vectors;

pub use inertia::SpatialInertia;
pub use ops::{
    adjoint_force, adjoint_motion, force_cross_dual, motion_cross, rigid_body_newton_euler,
    rotation_distance, skew, vee,
};
pub use pose::Pose;
pub use rotation::Rotation;
pub use vectors::{ForceVector, MotionVector};

use thiserror::Error;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Vec6 = nalgebra::Vector6<f64>;
pub type Mat6 = nalgebra::Matrix6<f64>;

/// Residual tolerance for the antisymmetry precondition of [`vee`].
pub const ANTISYMMETRY_TOL: f64 = 1e-9;

/// Orthonormality tolerance for rotation matrices.
pub const ROTATION_TOL: f64 = 1e-9;

/// Orthonormality drift above which integrated rotations are re-projected.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Error, PartialEq)]
pub enum SpatialError {
    #[error("matrix is not antisymmetric (residual {residual:.3e})")]
    NotAntisymmetric { residual: f64 },
    #[error("matrix is not a rotation ({reason})")]
    NotARotation { reason: String },
}
