use std::ops::Mul;

use super::{Rotation, Vec3};

/// Rigid-body pose: rotation plus position, an element of SE(3).
///
/// A pose `a_h_b` maps the B-coordinates of a point to A-coordinates via
/// `p_a = R * p_b + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rotation: Rotation,
    pub position: Vec3,
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: Rotation::identity(),
            position: Vec3::zeros(),
        }
    }

    pub fn new(rotation: Rotation, position: Vec3) -> Self {
        Self { rotation, position }
    }

    pub fn from_rotation(rotation: Rotation) -> Self {
        Self {
            rotation,
            position: Vec3::zeros(),
        }
    }

    pub fn from_translation(position: Vec3) -> Self {
        Self {
            rotation: Rotation::identity(),
            position,
        }
    }

    pub fn inverse(&self) -> Self {
        let rot = self.rotation.inverse();
        Self {
            position: -rot.rotate(&self.position),
            rotation: rot,
        }
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation.rotate(p) + self.position
    }
}

impl Mul for Pose {
    type Output = Pose;

    fn mul(self, rhs: Pose) -> Pose {
        Pose {
            rotation: self.rotation * rhs.rotation,
            position: self.position + self.rotation.rotate(&rhs.position),
        }
    }
}
