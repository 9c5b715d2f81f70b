use nalgebra::DVector;

use crate::kinematics::{forward_kinematics, Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{ForceVector, MotionVector, Pose, Vec3};

/// System acceleration: same layout as [`Velocity`], holding the time
/// derivative of the mixed base velocity plus joint accelerations.
pub type Acceleration = Velocity;

/// Per-link body-frame kinematics shared by inverse dynamics, the
/// estimation constraint builder and the synthetic-sensor generator.
///
/// `proper_accelerations[i]` is the link's spatial acceleration minus
/// gravity, expressed in the link frame: exactly what an ideal IMU rigidly
/// attached to the link reports.
#[derive(Clone, Debug)]
pub struct BodyKinematics {
    pub poses: Vec<Pose>,
    pub body_velocities: Vec<MotionVector>,
    pub proper_accelerations: Vec<MotionVector>,
    pub joint_rates: Vec<f64>,
}

/// Mixed base velocity to body-frame twist.
fn base_velocity_to_body(base_pose: &Pose, v: &MotionVector) -> MotionVector {
    MotionVector::new(
        base_pose.rotation.rotate_back(&v.linear),
        base_pose.rotation.rotate_back(&v.angular),
    )
}

/// Time derivative of the mixed base velocity to body-frame spatial
/// acceleration.
fn base_acceleration_to_body(
    base_pose: &Pose,
    v: &MotionVector,
    a: &MotionVector,
) -> MotionVector {
    MotionVector::new(
        base_pose
            .rotation
            .rotate_back(&(a.linear - v.angular.cross(&v.linear))),
        base_pose.rotation.rotate_back(&a.angular),
    )
}

/// Forward pass of the Newton-Euler recursion with the gravity offset folded
/// into the base boundary condition, so every propagated acceleration is a
/// proper (gravity-less) sensor acceleration.
pub fn proper_accelerations(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    acceleration: &Acceleration,
    gravity: &Vec3,
) -> BodyKinematics {
    let poses = forward_kinematics(model, q);
    let nb = model.num_links();
    let mut body_velocities = vec![MotionVector::zero(); nb];
    let mut proper = vec![MotionVector::zero(); nb];
    let mut joint_rates = vec![0.0; model.num_joints()];

    body_velocities[0] = base_velocity_to_body(&q.base_pose, &velocity.base);
    let gravity_body = MotionVector::new(q.base_pose.rotation.rotate_back(gravity), Vec3::zeros());
    proper[0] =
        base_acceleration_to_body(&q.base_pose, &velocity.base, &acceleration.base) - gravity_body;

    for (ji, joint) in model.joints().iter().enumerate() {
        let (qj, qdj, qddj) = match model.dof_index(ji) {
            Some(di) => (
                q.joint_pos[di],
                velocity.joint_vel[di],
                acceleration.joint_vel[di],
            ),
            None => (0.0, 0.0, 0.0),
        };
        joint_rates[ji] = qdj;
        let rel = joint.child_pose_in_parent(qj);
        let v_parent = body_velocities[joint.parent].change_frame(&rel);
        let a_parent = proper[joint.parent].change_frame(&rel);
        match joint.motion_subspace() {
            Some(s) => {
                let axis = Vec3::new(s[3], s[4], s[5]);
                let v_joint = MotionVector::new(Vec3::zeros(), axis * qdj);
                let v_child = v_parent + v_joint;
                let a_joint = MotionVector::new(Vec3::zeros(), axis * qddj);
                proper[joint.child] = a_parent + a_joint + v_child.cross_motion(&v_joint);
                body_velocities[joint.child] = v_child;
            }
            None => {
                body_velocities[joint.child] = v_parent;
                proper[joint.child] = a_parent;
            }
        }
    }
    BodyKinematics {
        poses,
        body_velocities,
        proper_accelerations: proper,
        joint_rates,
    }
}

#[derive(Clone, Debug)]
pub struct RneaResult {
    pub joint_torques: DVector<f64>,
    /// Net wrench the world must apply to the base, in the mixed frame
    /// (world axes, moment about the base origin).
    pub base_wrench: ForceVector,
}

/// Recursive Newton-Euler inverse dynamics for a floating-base tree.
///
/// `external` holds one wrench per link, expressed in that link's frame;
/// pass an empty slice for none.
pub fn rnea(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    acceleration: &Acceleration,
    gravity: &Vec3,
    external: &[ForceVector],
) -> RneaResult {
    let kin = proper_accelerations(model, q, velocity, acceleration, gravity);
    rnea_backward(model, q, &kin, external)
}

pub(crate) fn rnea_backward(
    model: &FloatingBaseModel,
    q: &Configuration,
    kin: &BodyKinematics,
    external: &[ForceVector],
) -> RneaResult {
    let nb = model.num_links();
    assert!(
        external.is_empty() || external.len() == nb,
        "external wrenches must be empty or one per link"
    );
    let mut net: Vec<ForceVector> = (0..nb)
        .map(|i| {
            let inertia = &model.link(i).inertia;
            let v = &kin.body_velocities[i];
            let mut f = inertia.apply(&kin.proper_accelerations[i])
                + v.cross_force(&inertia.apply(v));
            if !external.is_empty() {
                f = f - external[i];
            }
            f
        })
        .collect();

    let mut torques = DVector::zeros(model.dof());
    for ji in (0..model.num_joints()).rev() {
        let joint = model.joint(ji);
        let qj = model.dof_index(ji).map_or(0.0, |di| q.joint_pos[di]);
        if let (Some(di), Some(s)) = (model.dof_index(ji), joint.motion_subspace()) {
            let axis = Vec3::new(s[3], s[4], s[5]);
            torques[di] = axis.dot(&net[joint.child].moment);
        }
        // Transmit the joint wrench into the parent frame.
        let rel = joint.child_pose_in_parent(qj);
        let into_parent = net[joint.child].change_frame(&rel.inverse());
        net[joint.parent] = net[joint.parent] + into_parent;
    }

    let base_rot = &q.base_pose.rotation;
    RneaResult {
        joint_torques: torques,
        base_wrench: ForceVector::new(
            base_rot.rotate(&net[0].force),
            base_rot.rotate(&net[0].moment),
        ),
    }
}

/// Joint wrenches transmitted through every joint, in child-link frames.
/// Used by the estimation ground-truth builder; returns the leftover net
/// wrench at the base (zero for dynamically consistent inputs).
pub fn rnea_joint_wrenches(
    model: &FloatingBaseModel,
    kin: &BodyKinematics,
    external: &[ForceVector],
    q: &Configuration,
) -> (Vec<ForceVector>, ForceVector) {
    let nb = model.num_links();
    let mut net: Vec<ForceVector> = (0..nb)
        .map(|i| {
            let inertia = &model.link(i).inertia;
            let v = &kin.body_velocities[i];
            let mut f = inertia.apply(&kin.proper_accelerations[i])
                + v.cross_force(&inertia.apply(v));
            if !external.is_empty() {
                f = f - external[i];
            }
            f
        })
        .collect();
    let mut wrenches = vec![ForceVector::zero(); model.num_joints()];
    for ji in (0..model.num_joints()).rev() {
        let joint = model.joint(ji);
        let qj = model.dof_index(ji).map_or(0.0, |di| q.joint_pos[di]);
        wrenches[ji] = net[joint.child];
        let rel = joint.child_pose_in_parent(qj);
        net[joint.parent] = net[joint.parent] + net[joint.child].change_frame(&rel.inverse());
    }
    (wrenches, net[0])
}
