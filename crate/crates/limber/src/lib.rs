//! Floating-base rigid multi-body toolkit.
//!
//! The crate is organized as a pipeline: [`spatial`] provides the 6D algebra,
//! [`model`] builds and parses kinematic trees, [`kinematics`] solves forward
//! kinematics and motion-tracking inverse kinematics, [`dynamics`] implements
//! recursive Newton-Euler inverse dynamics and derived quantities (mass
//! matrix, centroidal momentum, contact constraints), [`estimation`] runs the
//! Gaussian MAP whole-body dynamics estimator with sensorless external-force
//! estimation, [`control`] contains the interaction-aware control laws, and
//! [`harness`] wires everything into reproducible batch scenarios.
//!
//! With the `parallel` feature (on by default) the batch entry points fan out
//! over rayon; without it they fall back to sequential iteration with
//! identical results.

pub mod control;
pub mod dynamics;
pub mod estimation;
pub mod harness;
pub mod kinematics;
pub mod model;
pub mod spatial;

mod batch;

pub use batch::{batch_map, batch_map_seq};
