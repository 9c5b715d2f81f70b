use super::{Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{MotionVector, Pose};

/// World pose of every link; the base link carries the configuration's base
/// pose and children follow the joint transforms.
pub fn forward_kinematics(model: &FloatingBaseModel, q: &Configuration) -> Vec<Pose> {
    let mut poses = vec![Pose::identity(); model.num_links()];
    poses[0] = q.base_pose;
    for (ji, joint) in model.joints().iter().enumerate() {
        let angle = model.dof_index(ji).map_or(0.0, |di| q.joint_pos[di]);
        poses[joint.child] = poses[joint.parent] * joint.child_pose_in_parent(angle);
    }
    poses
}

/// Mixed-frame velocity of every link: world-frame velocity of the link
/// origin plus world-frame angular velocity.
pub fn link_velocities(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
) -> Vec<MotionVector> {
    let poses = forward_kinematics(model, q);
    link_velocities_with_poses(model, &poses, velocity)
}

pub(crate) fn link_velocities_with_poses(
    model: &FloatingBaseModel,
    poses: &[Pose],
    velocity: &Velocity,
) -> Vec<MotionVector> {
    let mut vels = vec![MotionVector::zero(); model.num_links()];
    vels[0] = velocity.base;
    for (ji, joint) in model.joints().iter().enumerate() {
        let parent = joint.parent;
        let child = joint.child;
        // The child origin is a point fixed in the parent; the joint rate
        // only adds angular velocity about an axis through that origin.
        let r = poses[child].position - poses[parent].position;
        let linear = vels[parent].linear + vels[parent].angular.cross(&r);
        let mut angular = vels[parent].angular;
        if let (Some(di), Some(subspace)) = (model.dof_index(ji), joint.motion_subspace()) {
            let axis_child = crate::spatial::Vec3::new(subspace[3], subspace[4], subspace[5]);
            let axis_world = poses[child].rotation.rotate(&axis_child);
            angular += axis_world * velocity.joint_vel[di];
        }
        vels[child] = MotionVector::new(linear, angular);
    }
    vels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::models::planar_chain;
    use crate::spatial::{Rotation, Vec3};
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    #[test]
    fn identity_chain_matches_neutral_frames() {
        // Link frames sit at the proximal joint: the first at the base
        // origin, each following one link-length further along +x.
        let model = planar_chain(3, 1.0, 1.0);
        let q = Configuration::neutral(&model);
        let poses = forward_kinematics(&model, &q);
        assert_relative_eq!(poses[0].position, Vec3::zeros(), epsilon = 1e-12);
        for (i, pose) in poses.iter().enumerate().skip(1) {
            assert_relative_eq!(
                pose.position,
                Vec3::new((i - 1) as f64, 0.0, 0.0),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn planar_two_link_tip_position() {
        // Two unit links rotating about z; at angles (pi/2, 0) the chain
        // points along +y and the tip sits at (0, 2, 0).
        let model = planar_chain(2, 1.0, 1.0);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = std::f64::consts::FRAC_PI_2;
        let poses = forward_kinematics(&model, &q);
        let tip = poses[2].transform_point(&Vec3::new(1.0, 0.0, 0.0));
        assert_relative_eq!(tip, Vec3::new(0.0, 2.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn base_motion_translates_all_links() {
        let model = planar_chain(3, 1.0, 1.0);
        let mut q = Configuration::neutral(&model);
        q.joint_pos = DVector::from_vec(vec![0.3, -0.5, 0.9]);
        let before = forward_kinematics(&model, &q);
        let shift = crate::spatial::Pose::new(Rotation::about_z(0.4), Vec3::new(1.0, -2.0, 0.5));
        let moved = Configuration::new(shift * q.base_pose, q.joint_pos.clone());
        let after = forward_kinematics(&model, &moved);
        for (b, a) in before.iter().zip(after.iter()) {
            let expected = shift * *b;
            assert_relative_eq!(a.position, expected.position, epsilon = 1e-12);
            assert_relative_eq!(
                *a.rotation.matrix(),
                *expected.rotation.matrix(),
                epsilon = 1e-12
            );
        }
    }
}
