use nalgebra::DVector;

use crate::model::FloatingBaseModel;
use crate::spatial::{MotionVector, Pose, Vec3};

/// Floating-base configuration: base pose plus joint positions.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub base_pose: Pose,
    pub joint_pos: DVector<f64>,
}

impl Configuration {
    pub fn neutral(model: &FloatingBaseModel) -> Self {
        Self {
            base_pose: Pose::identity(),
            joint_pos: DVector::zeros(model.dof()),
        }
    }

    pub fn new(base_pose: Pose, joint_pos: DVector<f64>) -> Self {
        Self {
            base_pose,
            joint_pos,
        }
    }

    /// Euler step by a system velocity over `dt`; the base rotation advances
    /// through the exponential map of the world angular velocity.
    pub fn integrated(&self, velocity: &Velocity, dt: f64) -> Self {
        Self {
            base_pose: Pose::new(
                self.base_pose.rotation.integrated(&velocity.base.angular, dt),
                self.base_pose.position + velocity.base.linear * dt,
            ),
            joint_pos: &self.joint_pos + &velocity.joint_vel * dt,
        }
    }

    /// Clamps joint positions into the model's limits where defined.
    pub fn clamped_to_limits(&self, model: &FloatingBaseModel) -> Self {
        let mut joint_pos = self.joint_pos.clone();
        for (ji, joint) in model.joints().iter().enumerate() {
            if let (Some(di), Some((lower, upper))) = (model.dof_index(ji), joint.limits) {
                joint_pos[di] = joint_pos[di].clamp(lower, upper);
            }
        }
        Self {
            base_pose: self.base_pose,
            joint_pos,
        }
    }

    pub fn respects_limits(&self, model: &FloatingBaseModel) -> bool {
        model.joints().iter().enumerate().all(|(ji, joint)| {
            match (model.dof_index(ji), joint.limits) {
                (Some(di), Some((lower, upper))) => {
                    self.joint_pos[di] >= lower - 1e-12 && self.joint_pos[di] <= upper + 1e-12
                }
                _ => true,
            }
        })
    }
}

/// System velocity: base 6D velocity plus joint rates, dimension n + 6.
#[derive(Clone, Debug)]
pub struct Velocity {
    pub base: MotionVector,
    pub joint_vel: DVector<f64>,
}

impl Velocity {
    pub fn zero(model: &FloatingBaseModel) -> Self {
        Self {
            base: MotionVector::zero(),
            joint_vel: DVector::zeros(model.dof()),
        }
    }

    pub fn new(base: MotionVector, joint_vel: DVector<f64>) -> Self {
        Self { base, joint_vel }
    }

    pub fn dim(&self) -> usize {
        6 + self.joint_vel.len()
    }

    pub fn from_vector(stacked: &DVector<f64>) -> Self {
        let base = MotionVector::new(
            Vec3::new(stacked[0], stacked[1], stacked[2]),
            Vec3::new(stacked[3], stacked[4], stacked[5]),
        );
        Self {
            base,
            joint_vel: DVector::from_iterator(stacked.len() - 6, stacked.iter().skip(6).copied()),
        }
    }

    pub fn to_vector(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v.fixed_rows_mut::<3>(0).copy_from(&self.base.linear);
        v.fixed_rows_mut::<3>(3).copy_from(&self.base.angular);
        v.rows_mut(6, self.joint_vel.len()).copy_from(&self.joint_vel);
        v
    }
}
