use nalgebra::DVector;

use crate::dynamics::{proper_accelerations, Acceleration};
use crate::kinematics::{Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{ForceVector, Vec3};

/// Index layout of the dynamic-variables vector `d`.
///
/// Link blocks come first, interleaving each link's proper acceleration (6)
/// and external wrench (6); then one 6D wrench per joint; then one entry per
/// joint dof. For single-dof trees the total length is `12 N_B + 7 n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariableLayout {
    pub links: usize,
    pub joints: usize,
    pub dofs: usize,
}

impl VariableLayout {
    pub fn of(model: &FloatingBaseModel) -> Self {
        Self {
            links: model.num_links(),
            joints: model.num_joints(),
            dofs: model.dof(),
        }
    }

    pub fn len(&self) -> usize {
        12 * self.links + 6 * self.joints + self.dofs
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Offset of link `i`'s proper-acceleration block.
    pub fn link_acceleration(&self, i: usize) -> usize {
        12 * i
    }

    /// Offset of link `i`'s external-wrench block.
    pub fn link_wrench(&self, i: usize) -> usize {
        12 * i + 6
    }

    /// Offset of joint `j`'s transmitted-wrench block.
    pub fn joint_wrench(&self, j: usize) -> usize {
        12 * self.links + 6 * j
    }

    /// Offset of dof `di`'s joint acceleration.
    pub fn joint_acceleration(&self, di: usize) -> usize {
        12 * self.links + 6 * self.joints + di
    }
}

/// Assembles the ground-truth `d` for a state and motion, using the same
/// recursion as the constraint builder so the two cannot disagree.
///
/// `external` holds one wrench per link in link frames. The result satisfies
/// the model constraints exactly when the external wrenches balance the
/// floating base.
pub fn ground_truth_variables(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    acceleration: &Acceleration,
    gravity: &Vec3,
    external: &[ForceVector],
) -> DVector<f64> {
    let layout = VariableLayout::of(model);
    let kin = proper_accelerations(model, q, velocity, acceleration, gravity);
    let (joint_wrenches, _) =
        crate::dynamics::rnea_joint_wrenches(model, &kin, external, q);
    let mut d = DVector::zeros(layout.len());
    for i in 0..layout.links {
        d.fixed_rows_mut::<6>(layout.link_acceleration(i))
            .copy_from(&kin.proper_accelerations[i].to_vector());
        if !external.is_empty() {
            d.fixed_rows_mut::<6>(layout.link_wrench(i))
                .copy_from(&external[i].to_vector());
        }
    }
    for j in 0..layout.joints {
        d.fixed_rows_mut::<6>(layout.joint_wrench(j))
            .copy_from(&joint_wrenches[j].to_vector());
    }
    for (j, _) in model.joints().iter().enumerate() {
        if let Some(di) = model.dof_index(j) {
            d[layout.joint_acceleration(di)] = acceleration.joint_vel[di];
        }
    }
    d
}
