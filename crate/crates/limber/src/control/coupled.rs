use nalgebra::{DMatrix, DVector};

use super::feedback::pinv;
use super::{ControlError, PINV_THRESHOLD};
use crate::dynamics::{
    bias_forces, mass_matrix, point_jacobian, point_jacobian_dot, Acceleration, BaumgarteGains,
    ContactPoint, ContactSet,
};
use crate::kinematics::{forward_kinematics, Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{rotation_distance, ForceVector, Pose, Vec3};

/// One agent of the coupled system with its environment contacts.
#[derive(Clone, Debug)]
pub struct AgentState {
    pub model: FloatingBaseModel,
    pub q: Configuration,
    pub v: Velocity,
    pub env_contacts: ContactSet,
}

/// How the agents touch: a plane contact welds all six relative velocity
/// components, a point contact pins only the three translations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutualKind {
    Weld,
    Point,
}

/// The rigid mutual contact: one frame on each agent, constrained to move
/// together.
#[derive(Clone, Debug)]
pub struct MutualContact {
    pub ea_point: ContactPoint,
    pub robot_point: ContactPoint,
    pub kind: MutualKind,
}

impl MutualContact {
    pub fn rows(&self) -> usize {
        match self.kind {
            MutualKind::Weld => 6,
            MutualKind::Point => 3,
        }
    }
}

/// External agent plus robot, coupled through the mutual contact.
///
/// The stacked velocity is `[nu_ea; nu_r]`; the stacked wrench vector is
/// `[f_m; f_ea_env...; f_r_env...]` with the mutual wrench expressed as the
/// wrench the robot applies on the external agent (the robot receives its
/// negative).
#[derive(Clone, Debug)]
pub struct CoupledSystem {
    pub ea: AgentState,
    pub robot: AgentState,
    pub mutual: MutualContact,
    pub gravity: Vec3,
}

pub(crate) struct CoupledMatrices {
    pub mass: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub b_sel: DMatrix<f64>,
    /// Constraint rows = force-map rows: `P = J_c`.
    pub p: DMatrix<f64>,
    pub pdot: DMatrix<f64>,
    pub vel: DVector<f64>,
}

impl CoupledSystem {
    pub fn ea_dofs(&self) -> usize {
        self.ea.model.dof()
    }

    pub fn robot_dofs(&self) -> usize {
        self.robot.model.dof()
    }

    /// Total stacked wrench dimension: the mutual block (3 or 6) plus six
    /// per environment contact.
    pub fn wrench_rows(&self) -> usize {
        self.mutual.rows()
            + 6 * (self.ea.env_contacts.points.len() + self.robot.env_contacts.points.len())
    }

    pub(crate) fn assemble(&self) -> CoupledMatrices {
        let (n_ea, n_r) = (self.ea_dofs(), self.robot_dofs());
        let (dim_ea, dim_r) = (n_ea + 6, n_r + 6);
        let total = dim_ea + dim_r;
        let rows = self.wrench_rows();

        let mut mass = DMatrix::zeros(total, total);
        mass.view_mut((0, 0), (dim_ea, dim_ea))
            .copy_from(&mass_matrix(&self.ea.model, &self.ea.q));
        mass.view_mut((dim_ea, dim_ea), (dim_r, dim_r))
            .copy_from(&mass_matrix(&self.robot.model, &self.robot.q));

        let mut bias = DVector::zeros(total);
        bias.rows_mut(0, dim_ea).copy_from(&bias_forces(
            &self.ea.model,
            &self.ea.q,
            &self.ea.v,
            &self.gravity,
        ));
        bias.rows_mut(dim_ea, dim_r).copy_from(&bias_forces(
            &self.robot.model,
            &self.robot.q,
            &self.robot.v,
            &self.gravity,
        ));

        let mut b_sel = DMatrix::zeros(total, n_ea + n_r);
        for k in 0..n_ea {
            b_sel[(6 + k, k)] = 1.0;
        }
        for k in 0..n_r {
            b_sel[(dim_ea + 6 + k, n_ea + k)] = 1.0;
        }

        let ea_poses = forward_kinematics(&self.ea.model, &self.ea.q);
        let r_poses = forward_kinematics(&self.robot.model, &self.robot.q);
        let mut p = DMatrix::zeros(rows, total);
        let mut pdot = DMatrix::zeros(rows, total);
        // Mutual rows first: J_ea - J_r on the shared frame velocities;
        // point contacts keep only the linear rows.
        let mrows = self.mutual.rows();
        {
            let pt = &self.mutual.ea_point;
            let world = pt.world_pose(&ea_poses).position;
            let j = point_jacobian(&self.ea.model, &self.ea.q, pt.link, &world);
            let jd =
                point_jacobian_dot(&self.ea.model, &self.ea.q, &self.ea.v, pt.link, &world);
            p.view_mut((0, 0), (mrows, dim_ea)).copy_from(&j.rows(0, mrows));
            pdot.view_mut((0, 0), (mrows, dim_ea))
                .copy_from(&jd.rows(0, mrows));
            let pt = &self.mutual.robot_point;
            let world = pt.world_pose(&r_poses).position;
            let j = point_jacobian(&self.robot.model, &self.robot.q, pt.link, &world);
            let jd = point_jacobian_dot(
                &self.robot.model,
                &self.robot.q,
                &self.robot.v,
                pt.link,
                &world,
            );
            p.view_mut((0, dim_ea), (mrows, dim_r))
                .copy_from(&(-j.rows(0, mrows)));
            pdot.view_mut((0, dim_ea), (mrows, dim_r))
                .copy_from(&(-jd.rows(0, mrows)));
        }
        let mut row = mrows;
        for pt in &self.ea.env_contacts.points {
            let world = pt.world_pose(&ea_poses).position;
            p.view_mut((row, 0), (6, dim_ea)).copy_from(&point_jacobian(
                &self.ea.model,
                &self.ea.q,
                pt.link,
                &world,
            ));
            pdot.view_mut((row, 0), (6, dim_ea))
                .copy_from(&point_jacobian_dot(
                    &self.ea.model,
                    &self.ea.q,
                    &self.ea.v,
                    pt.link,
                    &world,
                ));
            row += 6;
        }
        for pt in &self.robot.env_contacts.points {
            let world = pt.world_pose(&r_poses).position;
            p.view_mut((row, dim_ea), (6, dim_r))
                .copy_from(&point_jacobian(
                    &self.robot.model,
                    &self.robot.q,
                    pt.link,
                    &world,
                ));
            pdot.view_mut((row, dim_ea), (6, dim_r))
                .copy_from(&point_jacobian_dot(
                    &self.robot.model,
                    &self.robot.q,
                    &self.robot.v,
                    pt.link,
                    &world,
                ));
            row += 6;
        }

        let mut vel = DVector::zeros(total);
        vel.rows_mut(0, dim_ea).copy_from(&self.ea.v.to_vector());
        vel.rows_mut(dim_ea, dim_r)
            .copy_from(&self.robot.v.to_vector());

        CoupledMatrices {
            mass,
            bias,
            b_sel,
            p,
            pdot,
            vel,
        }
    }

    /// Selection of the wrenches acting on the robot out of the stacked
    /// wrench vector: minus the mutual wrench, plus the robot's environment
    /// wrenches.
    pub fn robot_wrench_selection(&self) -> DMatrix<f64> {
        let e_ea = self.ea.env_contacts.points.len();
        let e_r = self.robot.env_contacts.points.len();
        let mrows = self.mutual.rows();
        let mut s = DMatrix::zeros(mrows + 6 * e_r, self.wrench_rows());
        for i in 0..mrows {
            s[(i, i)] = -1.0;
        }
        for k in 0..e_r {
            for i in 0..6 {
                s[(mrows + 6 * k + i, mrows + 6 * (e_ea + k) + i)] = 1.0;
            }
        }
        s
    }

    /// Force map of the robot: generalized forces per unit wrench acting on
    /// the robot at its mutual frame and environment contacts.
    pub fn robot_force_map(&self) -> DMatrix<f64> {
        let n_r = self.robot_dofs();
        let e_r = self.robot.env_contacts.points.len();
        let mrows = self.mutual.rows();
        let poses = forward_kinematics(&self.robot.model, &self.robot.q);
        let mut jc_t = DMatrix::zeros(n_r + 6, mrows + 6 * e_r);
        let world = self.mutual.robot_point.world_pose(&poses).position;
        let j = point_jacobian(
            &self.robot.model,
            &self.robot.q,
            self.mutual.robot_point.link,
            &world,
        );
        jc_t.columns_mut(0, mrows)
            .copy_from(&j.rows(0, mrows).transpose());
        for (k, pt) in self.robot.env_contacts.points.iter().enumerate() {
            let world = pt.world_pose(&poses).position;
            jc_t.columns_mut(mrows + 6 * k, 6).copy_from(
                &point_jacobian(&self.robot.model, &self.robot.q, pt.link, &world).transpose(),
            );
        }
        jc_t
    }
}

/// Affine decomposition of the contact wrenches in the agent torques:
/// `f = G1 tau_ea + G2 tau_r + G3`.
#[derive(Clone, Debug)]
pub struct WrenchMap {
    pub g1: DMatrix<f64>,
    pub g2: DMatrix<f64>,
    pub g3: DVector<f64>,
}

impl WrenchMap {
    pub fn wrenches(&self, tau_ea: &DVector<f64>, tau_r: &DVector<f64>) -> DVector<f64> {
        &self.g1 * tau_ea + &self.g2 * tau_r + &self.g3
    }
}

/// Closed-form contact/interaction wrench map
/// `f = -Gamma^+ [P M^-1 (B tau - h) + Pdot V]` with
/// `Gamma = P M^-1 J_c^T`, split into its torque sensitivities.
pub fn coupled_wrench_map(sys: &CoupledSystem) -> Result<WrenchMap, ControlError> {
    let mats = sys.assemble();
    let m_inv = mats
        .mass
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(ControlError::SingularGamma)?;
    let gamma = &mats.p * &m_inv * mats.p.transpose();
    let svd_min = gamma.clone().svd(false, false);
    let smax = svd_min.singular_values.max();
    let smin = svd_min.singular_values.min();
    if smax <= 0.0 || smin / smax < PINV_THRESHOLD {
        return Err(ControlError::SingularGamma);
    }
    let (gamma_pinv, _) = pinv(&gamma);
    let pm = &mats.p * &m_inv;
    let sensitivities = -&gamma_pinv * &pm * &mats.b_sel;
    let n_ea = sys.ea_dofs();
    let n_r = sys.robot_dofs();
    let g1 = sensitivities.columns(0, n_ea).clone_owned();
    let g2 = sensitivities.columns(n_ea, n_r).clone_owned();
    let g3 = &gamma_pinv * (&pm * &mats.bias - &mats.pdot * &mats.vel);
    Ok(WrenchMap { g1, g2, g3 })
}

/// KKT constrained dynamics of the coupled system, used both as the
/// simulation backend and as the oracle the wrench map is checked against.
///
/// Returns the stacked accelerations and the wrench vector in the same
/// layout as [`coupled_wrench_map`].
pub fn coupled_constrained_dynamics(
    sys: &CoupledSystem,
    tau_ea: &DVector<f64>,
    tau_r: &DVector<f64>,
    env_anchors_ea: &[Pose],
    env_anchors_r: &[Pose],
    gains: BaumgarteGains,
) -> Result<(Acceleration, Acceleration, DVector<f64>), ControlError> {
    let mats = sys.assemble();
    let total = mats.mass.nrows();
    let rows = mats.p.nrows();
    let mut kkt = DMatrix::zeros(total + rows, total + rows);
    kkt.view_mut((0, 0), (total, total)).copy_from(&mats.mass);
    kkt.view_mut((0, total), (total, rows))
        .copy_from(&(-mats.p.transpose()));
    kkt.view_mut((total, 0), (rows, total)).copy_from(&mats.p);

    let mut tau = DVector::zeros(sys.ea_dofs() + sys.robot_dofs());
    tau.rows_mut(0, sys.ea_dofs()).copy_from(tau_ea);
    tau.rows_mut(sys.ea_dofs(), sys.robot_dofs())
        .copy_from(tau_r);

    let mut rhs = DVector::zeros(total + rows);
    rhs.rows_mut(0, total)
        .copy_from(&(&mats.b_sel * &tau - &mats.bias));

    // Constraint rows with Baumgarte stabilization.
    let drift = &mats.pdot * &mats.vel;
    let vel_err = &mats.p * &mats.vel;
    let ea_poses = forward_kinematics(&sys.ea.model, &sys.ea.q);
    let r_poses = forward_kinematics(&sys.robot.model, &sys.robot.q);
    let mut err = DVector::zeros(rows);
    {
        // Mutual: relative pose error between the two contact frames.
        let pa = sys.mutual.ea_point.world_pose(&ea_poses);
        let pb = sys.mutual.robot_point.world_pose(&r_poses);
        err.fixed_rows_mut::<3>(0).copy_from(&(pa.position - pb.position));
        if sys.mutual.rows() == 6 {
            err.fixed_rows_mut::<3>(3)
                .copy_from(&rotation_distance(&pb.rotation, &pa.rotation));
        }
    }
    let mut row = sys.mutual.rows();
    for (pt, anchor) in sys.ea.env_contacts.points.iter().zip(env_anchors_ea) {
        let current = pt.world_pose(&ea_poses);
        err.fixed_rows_mut::<3>(row)
            .copy_from(&(current.position - anchor.position));
        err.fixed_rows_mut::<3>(row + 3)
            .copy_from(&rotation_distance(&anchor.rotation, &current.rotation));
        row += 6;
    }
    for (pt, anchor) in sys.robot.env_contacts.points.iter().zip(env_anchors_r) {
        let current = pt.world_pose(&r_poses);
        err.fixed_rows_mut::<3>(row)
            .copy_from(&(current.position - anchor.position));
        err.fixed_rows_mut::<3>(row + 3)
            .copy_from(&rotation_distance(&anchor.rotation, &current.rotation));
        row += 6;
    }
    for r in 0..rows {
        rhs[total + r] = -drift[r] - gains.velocity * vel_err[r] - gains.position * err[r];
    }

    let solution = kkt
        .lu()
        .solve(&rhs)
        .ok_or(ControlError::SingularGamma)?;
    let dim_ea = sys.ea_dofs() + 6;
    let dim_r = sys.robot_dofs() + 6;
    let acc_ea = Acceleration::from_vector(&solution.rows(0, dim_ea).clone_owned());
    let acc_r = Acceleration::from_vector(&solution.rows(dim_ea, dim_r).clone_owned());
    let wrenches = solution.rows(total, rows).clone_owned();
    Ok((acc_ea, acc_r, wrenches))
}

/// Splits the stacked wrench vector into 6D wrenches.
pub fn split_wrenches(stacked: &DVector<f64>) -> Vec<ForceVector> {
    (0..stacked.len() / 6)
        .map(|k| {
            ForceVector::from_vector(&nalgebra::Vector6::from_iterator(
                stacked.rows(6 * k, 6).iter().copied(),
            ))
        })
        .collect()
}
