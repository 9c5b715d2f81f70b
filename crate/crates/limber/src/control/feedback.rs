use nalgebra::{DMatrix, DVector};

use super::{ControlError, PINV_THRESHOLD};
use crate::dynamics::{bias_forces, mass_matrix, ContactSet};
use crate::kinematics::{
    forward_kinematics, frame_jacobian, frame_jacobian_dot, Configuration, Velocity,
};
use crate::model::FloatingBaseModel;
use crate::spatial::{ForceVector, Vec3};

/// Row selection of a link's 6-row frame Jacobian defining the task space.
#[derive(Clone, Debug)]
pub enum TaskRows {
    Linear,
    Angular,
    Full,
    Custom(Vec<usize>),
}

impl TaskRows {
    pub fn indices(&self) -> Vec<usize> {
        match self {
            TaskRows::Linear => vec![0, 1, 2],
            TaskRows::Angular => vec![3, 4, 5],
            TaskRows::Full => (0..6).collect(),
            TaskRows::Custom(rows) => rows.clone(),
        }
    }
}

/// A task: selected rows of one link's frame Jacobian.
#[derive(Clone, Debug)]
pub struct TaskDefinition {
    pub link: usize,
    pub rows: TaskRows,
}

impl TaskDefinition {
    pub fn dim(&self) -> usize {
        self.rows.indices().len()
    }
}

/// Task Jacobian: the selected rows of the link's frame Jacobian.
pub fn task_jacobian(
    model: &FloatingBaseModel,
    q: &Configuration,
    task: &TaskDefinition,
) -> DMatrix<f64> {
    let j = frame_jacobian(model, q, task.link);
    select_rows(&j, &task.rows.indices())
}

pub fn task_jacobian_dot(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    task: &TaskDefinition,
) -> DMatrix<f64> {
    let jd = frame_jacobian_dot(model, q, velocity, task.link);
    select_rows(&jd, &task.rows.indices())
}

fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows.len(), m.ncols());
    for (k, &r) in rows.iter().enumerate() {
        out.row_mut(k).copy_from(&m.row(r));
    }
    out
}

/// Pseudoinverse by singular-value truncation at `PINV_THRESHOLD` relative
/// to the largest singular value; also reports the rank.
pub(crate) fn pinv(m: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let svd = m.clone().svd(true, true);
    let max = svd.singular_values.max();
    let threshold = max * PINV_THRESHOLD;
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > threshold && **s > 0.0)
        .count();
    let pinv = svd
        .pseudo_inverse(threshold.max(f64::MIN_POSITIVE))
        .expect("svd computed");
    (pinv, rank)
}

#[derive(Clone, Debug)]
pub struct FeedbackLinearization {
    pub torques: DVector<f64>,
    /// Nullspace projector of the task map, for lower-priority torques.
    pub nullspace: DMatrix<f64>,
    /// `J_x M^-1 B`.
    pub delta: DMatrix<f64>,
    /// `J_x M^-1 J_c^T`: task-space sensitivity to contact wrenches.
    pub omega: DMatrix<f64>,
    /// `J_x M^-1 h - Jdot_x nu`.
    pub lambda: DVector<f64>,
}

/// Feedback-linearization torques for a task-space objective:
/// `tau = Delta^+ (xddot* - Omega f + Lambda) + N tau0`.
///
/// Contact wrenches are given per contact point in world axes at the
/// contact frame origin, as produced by the constrained-dynamics solver.
#[allow(clippy::too_many_arguments)]
pub fn feedback_linearization_torques(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    task: &TaskDefinition,
    xddot_star: &DVector<f64>,
    contacts: &ContactSet,
    contact_wrenches: &[ForceVector],
    gravity: &Vec3,
    tau0: Option<&DVector<f64>>,
) -> Result<FeedbackLinearization, ControlError> {
    let n = model.dof();
    let p = task.dim();
    if xddot_star.len() != p {
        return Err(ControlError::DimensionMismatch(format!(
            "desired acceleration dim {} vs task dim {}",
            xddot_star.len(),
            p
        )));
    }
    let m = mass_matrix(model, q);
    let m_inv = m
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(ControlError::RankDeficient)?;
    let h = bias_forces(model, q, velocity, gravity);
    let jx = task_jacobian(model, q, task);
    let jxd = task_jacobian_dot(model, q, velocity, task);

    let delta = &jx * m_inv.columns(6, n);
    let poses = forward_kinematics(model, q);
    let mut jc_t = DMatrix::zeros(n + 6, contacts.rows());
    for (k, point) in contacts.points.iter().enumerate() {
        let world = point.world_pose(&poses).position;
        let jc = crate::dynamics::point_jacobian(model, q, point.link, &world);
        jc_t.columns_mut(6 * k, 6).copy_from(&jc.transpose());
    }
    let omega = &jx * &m_inv * &jc_t;
    let lambda = &jx * &m_inv * &h - &jxd * velocity.to_vector();

    let mut f = DVector::zeros(contacts.rows());
    for (k, w) in contact_wrenches.iter().enumerate() {
        f.fixed_rows_mut::<6>(6 * k).copy_from(&w.to_vector());
    }

    let (delta_pinv, rank) = pinv(&delta);
    if rank < p {
        return Err(ControlError::RankDeficientTask);
    }
    let nullspace = DMatrix::identity(n, n) - &delta_pinv * &delta;
    let mut torques = &delta_pinv * (xddot_star - &omega * &f + &lambda);
    if let Some(tau0) = tau0 {
        torques += &nullspace * tau0;
    }
    Ok(FeedbackLinearization {
        torques,
        nullspace,
        delta,
        omega,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::forward_dynamics;
    use crate::harness::models::hanging_chain;
    use crate::spatial::Vec3;

    const G: Vec3 = Vec3::new(0.0, 0.0, -9.81);

    fn tip_task(model: &FloatingBaseModel) -> TaskDefinition {
        // Planar x/z tip position rows of the last link.
        let _ = model;
        TaskDefinition {
            link: 2,
            rows: TaskRows::Custom(vec![0, 2]),
        }
    }

    #[test]
    fn achieves_desired_task_acceleration_on_free_floating_chain() {
        let model = hanging_chain(2, 1.0, 0.6);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = 0.4;
        q.joint_pos[1] = -0.3;
        let mut v = Velocity::zero(&model);
        v.joint_vel[0] = 0.5;
        let task = tip_task(&model);
        let xddot_star = DVector::from_vec(vec![0.3, -0.2]);
        let fl = feedback_linearization_torques(
            &model,
            &q,
            &v,
            &task,
            &xddot_star,
            &ContactSet::default(),
            &[],
            &G,
            None,
        )
        .unwrap();
        let nudot = forward_dynamics(&model, &q, &v, &fl.torques, &G, &[]);
        let jx = task_jacobian(&model, &q, &task);
        let jxd = task_jacobian_dot(&model, &q, &v, &task);
        let achieved = jx * nudot.to_vector() + jxd * v.to_vector();
        assert!(
            (achieved.clone() - xddot_star.clone()).amax() <= 1e-6,
            "achieved {achieved:?}"
        );
    }

    #[test]
    fn free_motion_target_needs_no_torque() {
        let model = hanging_chain(2, 1.0, 0.6);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = 0.7;
        q.joint_pos[1] = 0.5;
        let v = Velocity::zero(&model);
        let task = tip_task(&model);
        // Desired acceleration equal to the free-motion acceleration.
        let free = forward_dynamics(&model, &q, &v, &DVector::zeros(model.dof()), &G, &[]);
        let jx = task_jacobian(&model, &q, &task);
        let jxd = task_jacobian_dot(&model, &q, &v, &task);
        let xddot_free = jx * free.to_vector() + jxd * v.to_vector();
        let fl = feedback_linearization_torques(
            &model,
            &q,
            &v,
            &task,
            &xddot_free,
            &ContactSet::default(),
            &[],
            &G,
            None,
        )
        .unwrap();
        assert!(fl.torques.amax() <= 1e-9, "torques {:?}", fl.torques);
    }

    #[test]
    fn nullspace_motion_leaves_task_acceleration_unchanged() {
        // A 3-dof chain with a 2-dof task has one redundant direction.
        let model = hanging_chain(3, 1.0, 0.5);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = 0.3;
        q.joint_pos[1] = -0.5;
        q.joint_pos[2] = 0.2;
        let v = Velocity::zero(&model);
        let task = TaskDefinition {
            link: 3,
            rows: TaskRows::Custom(vec![0, 2]),
        };
        let xddot_star = DVector::from_vec(vec![0.1, 0.05]);
        let base = feedback_linearization_torques(
            &model, &q, &v, &task, &xddot_star, &ContactSet::default(), &[], &G, None,
        )
        .unwrap();
        let tau0 = DVector::from_vec(vec![3.0, -2.0, 1.0]);
        let with_null = feedback_linearization_torques(
            &model,
            &q,
            &v,
            &task,
            &xddot_star,
            &ContactSet::default(),
            &[],
            &G,
            Some(&tau0),
        )
        .unwrap();
        let task_acc = |tau: &DVector<f64>| {
            let nudot = forward_dynamics(&model, &q, &v, tau, &G, &[]);
            let jx = task_jacobian(&model, &q, &task);
            let jxd = task_jacobian_dot(&model, &q, &v, &task);
            jx * nudot.to_vector() + jxd * v.to_vector()
        };
        let a = task_acc(&base.torques);
        let b = task_acc(&with_null.torques);
        assert!((a - b).amax() <= 1e-9);
        assert!((base.torques.clone() - with_null.torques.clone()).norm() > 1e-6);
    }
}
