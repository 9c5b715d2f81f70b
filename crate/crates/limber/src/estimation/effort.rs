use nalgebra::DVector;

use super::variables::VariableLayout;
use crate::model::FloatingBaseModel;
use crate::spatial::Vec3;

/// Joint torques from a dynamic-variables vector: each dof projects its
/// joint's transmitted wrench onto the motion-subspace axis.
pub fn joint_torques_from(d: &DVector<f64>, model: &FloatingBaseModel) -> DVector<f64> {
    let layout = VariableLayout::of(model);
    let mut tau = DVector::zeros(model.dof());
    for (ji, joint) in model.joints().iter().enumerate() {
        let (Some(di), Some(s)) = (model.dof_index(ji), joint.motion_subspace()) else {
            continue;
        };
        let at = layout.joint_wrench(ji);
        let moment = Vec3::new(d[at + 3], d[at + 4], d[at + 5]);
        tau[di] = Vec3::new(s[3], s[4], s[5]).dot(&moment);
    }
    tau
}

/// Effort of one composite joint: the Euclidean norm of its up-to-three dof
/// torques.
pub fn joint_effort(torques: &[f64]) -> f64 {
    torques.iter().map(|t| t * t).sum::<f64>().sqrt()
}
