use nalgebra::DMatrix;

use crate::kinematics::{forward_kinematics, link_velocities, Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{skew, Pose, Vec3};

/// A contact frame rigidly attached to a link.
#[derive(Clone, Debug)]
pub struct ContactPoint {
    pub link: usize,
    /// Pose of the contact frame in the link frame.
    pub frame_in_link: Pose,
}

impl ContactPoint {
    pub fn at_origin(link: usize) -> Self {
        Self {
            link,
            frame_in_link: Pose::identity(),
        }
    }

    pub fn world_pose(&self, poses: &[Pose]) -> Pose {
        poses[self.link] * self.frame_in_link
    }
}

/// Environment contacts of one model: each contributes six constraint rows.
#[derive(Clone, Debug, Default)]
pub struct ContactSet {
    pub points: Vec<ContactPoint>,
}

impl ContactSet {
    pub fn new(points: Vec<ContactPoint>) -> Self {
        Self { points }
    }

    pub fn rows(&self) -> usize {
        6 * self.points.len()
    }
}

/// 6 x (n+6) Jacobian of a world point rigidly attached to `link`, in the
/// mixed convention (world axes, origin at the point).
pub fn point_jacobian(
    model: &FloatingBaseModel,
    q: &Configuration,
    link: usize,
    point_world: &Vec3,
) -> DMatrix<f64> {
    let poses = forward_kinematics(model, q);
    point_jacobian_with_poses(model, &poses, link, point_world)
}

pub(crate) fn point_jacobian_with_poses(
    model: &FloatingBaseModel,
    poses: &[Pose],
    link: usize,
    point_world: &Vec3,
) -> DMatrix<f64> {
    let n = model.dof();
    let mut j = DMatrix::zeros(6, n + 6);
    j.fixed_view_mut::<3, 3>(0, 0).fill_with_identity();
    j.fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&(-skew(&(point_world - poses[0].position))));
    j.fixed_view_mut::<3, 3>(3, 3).fill_with_identity();
    for ji in model.path_to_base(link) {
        let joint = model.joint(ji);
        let (Some(di), Some(s)) = (model.dof_index(ji), joint.motion_subspace()) else {
            continue;
        };
        let axis_world = poses[joint.child]
            .rotation
            .rotate(&Vec3::new(s[3], s[4], s[5]));
        let arm = point_world - poses[joint.child].position;
        j.fixed_view_mut::<3, 1>(0, 6 + di)
            .copy_from(&axis_world.cross(&arm));
        j.fixed_view_mut::<3, 1>(3, 6 + di).copy_from(&axis_world);
    }
    j
}

/// Analytic time derivative of [`point_jacobian`] for a point rigidly
/// attached to `link`.
pub fn point_jacobian_dot(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    link: usize,
    point_world: &Vec3,
) -> DMatrix<f64> {
    let poses = forward_kinematics(model, q);
    let vels = link_velocities(model, q, velocity);
    let n = model.dof();
    let point_vel =
        vels[link].linear + vels[link].angular.cross(&(point_world - poses[link].position));
    let mut jd = DMatrix::zeros(6, n + 6);
    jd.fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&(-skew(&(point_vel - vels[0].linear))));
    for ji in model.path_to_base(link) {
        let joint = model.joint(ji);
        let (Some(di), Some(s)) = (model.dof_index(ji), joint.motion_subspace()) else {
            continue;
        };
        let axis_world = poses[joint.child]
            .rotation
            .rotate(&Vec3::new(s[3], s[4], s[5]));
        let axis_dot = vels[joint.child].angular.cross(&axis_world);
        let arm = point_world - poses[joint.child].position;
        let arm_dot = point_vel - vels[joint.child].linear;
        jd.fixed_view_mut::<3, 1>(0, 6 + di)
            .copy_from(&(axis_dot.cross(&arm) + axis_world.cross(&arm_dot)));
        jd.fixed_view_mut::<3, 1>(3, 6 + di).copy_from(&axis_dot);
    }
    jd
}

/// Stacked environment-contact constraint matrices for one model:
/// `P nu = 0` with six rows per contact, and the analytic `Pdot`.
pub fn constraint_matrices(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    contacts: &ContactSet,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = model.dof();
    let poses = forward_kinematics(model, q);
    let mut p = DMatrix::zeros(contacts.rows(), n + 6);
    let mut pdot = DMatrix::zeros(contacts.rows(), n + 6);
    for (k, point) in contacts.points.iter().enumerate() {
        let world = point.world_pose(&poses).position;
        p.rows_mut(6 * k, 6)
            .copy_from(&point_jacobian_with_poses(model, &poses, point.link, &world));
        pdot.rows_mut(6 * k, 6).copy_from(&point_jacobian_dot(
            model, q, velocity, point.link, &world,
        ));
    }
    (p, pdot)
}
