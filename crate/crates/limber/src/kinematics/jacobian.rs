use nalgebra::DMatrix;

use super::fk::link_velocities_with_poses;
use super::{forward_kinematics, Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{skew, MotionVector, Vec3};

/// 6 x (n+6) frame Jacobian of `link` in the mixed convention, so that
/// `J * nu` is the world linear/angular velocity of the link frame.
///
/// The base block is `[I, -S(p_L - p_F); 0, I]`; columns of joints that are
/// not on the base-to-link path are zero.
pub fn frame_jacobian(model: &FloatingBaseModel, q: &Configuration, link: usize) -> DMatrix<f64> {
    let poses = forward_kinematics(model, q);
    frame_jacobian_with_poses(model, &poses, link)
}

pub(crate) fn frame_jacobian_with_poses(
    model: &FloatingBaseModel,
    poses: &[crate::spatial::Pose],
    link: usize,
) -> DMatrix<f64> {
    let n = model.dof();
    let mut j = DMatrix::zeros(6, n + 6);
    let p_link = poses[link].position;
    let p_base = poses[0].position;
    j.fixed_view_mut::<3, 3>(0, 0).fill_with_identity();
    j.fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&(-skew(&(p_link - p_base))));
    j.fixed_view_mut::<3, 3>(3, 3).fill_with_identity();
    for ji in model.path_to_base(link) {
        let joint = model.joint(ji);
        let Some(di) = model.dof_index(ji) else {
            continue;
        };
        let Some(subspace) = joint.motion_subspace() else {
            continue;
        };
        let axis_child = Vec3::new(subspace[3], subspace[4], subspace[5]);
        let axis_world = poses[joint.child].rotation.rotate(&axis_child);
        let arm = p_link - poses[joint.child].position;
        j.fixed_view_mut::<3, 1>(0, 6 + di)
            .copy_from(&axis_world.cross(&arm));
        j.fixed_view_mut::<3, 1>(3, 6 + di).copy_from(&axis_world);
    }
    j
}

/// Analytic time derivative of [`frame_jacobian`] along the state `(q, nu)`.
pub fn frame_jacobian_dot(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    link: usize,
) -> DMatrix<f64> {
    let poses = forward_kinematics(model, q);
    let vels = link_velocities_with_poses(model, &poses, velocity);
    let n = model.dof();
    let mut jd = DMatrix::zeros(6, n + 6);
    let dp_link = vels[link].linear;
    let dp_base = vels[0].linear;
    jd.fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&(-skew(&(dp_link - dp_base))));
    for ji in model.path_to_base(link) {
        let joint = model.joint(ji);
        let Some(di) = model.dof_index(ji) else {
            continue;
        };
        let Some(subspace) = joint.motion_subspace() else {
            continue;
        };
        let axis_child = Vec3::new(subspace[3], subspace[4], subspace[5]);
        let axis_world = poses[joint.child].rotation.rotate(&axis_child);
        // The axis is fixed in the child link, so it rotates with it.
        let axis_dot = vels[joint.child].angular.cross(&axis_world);
        let arm = poses[link].position - poses[joint.child].position;
        let arm_dot = vels[link].linear - vels[joint.child].linear;
        jd.fixed_view_mut::<3, 1>(0, 6 + di)
            .copy_from(&(axis_dot.cross(&arm) + axis_world.cross(&arm_dot)));
        jd.fixed_view_mut::<3, 1>(3, 6 + di).copy_from(&axis_dot);
    }
    jd
}

/// Frame bias acceleration `Jdot * nu`: the frame acceleration at zero
/// system acceleration.
pub fn frame_bias_acceleration(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    link: usize,
) -> MotionVector {
    let jd = frame_jacobian_dot(model, q, velocity, link);
    let stacked = jd * velocity.to_vector();
    MotionVector::new(
        Vec3::new(stacked[0], stacked[1], stacked[2]),
        Vec3::new(stacked[3], stacked[4], stacked[5]),
    )
}
