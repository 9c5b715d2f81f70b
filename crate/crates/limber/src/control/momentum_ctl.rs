use nalgebra::{DMatrix, DVector, Matrix6, Vector6};

use super::feedback::pinv;
use super::ControlError;
use crate::dynamics::{
    bias_forces, constraint_matrices, mass_matrix, ContactSet,
};
use crate::kinematics::{Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::ForceVector;

/// Virtual contact wrench realizing a desired momentum rate:
/// `f* = Jb^-T (Ldot* + m g e3)`.
pub fn momentum_balance_wrench(
    desired_momentum_rate: &Vector6<f64>,
    mass: f64,
    base_jacobian_block: &Matrix6<f64>,
    gravity_norm: f64,
) -> Result<ForceVector, ControlError> {
    let mut rhs = *desired_momentum_rate;
    rhs[2] += mass * gravity_norm;
    let solved = base_jacobian_block
        .transpose()
        .lu()
        .solve(&rhs)
        .ok_or(ControlError::SingularBaseJacobian)?;
    Ok(ForceVector::from_vector(&solved))
}

#[derive(Clone, Debug)]
pub struct MomentumTorques {
    pub torques: DVector<f64>,
    /// Nullspace projector of the constraint-to-torque map.
    pub nullspace: DMatrix<f64>,
}

/// Joint torques that instantaneously realize the contact wrenches `f*`
/// under the contact constraints:
/// `tau = Lambda^+ (Jc M^-1 (h - Jc^T f*) - Jcdot nu) + N tau0`, with
/// `Lambda` built from the decoupled (centroidal) coordinates.
pub fn momentum_torques(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    contacts: &ContactSet,
    f_star: &[ForceVector],
    gravity: &crate::spatial::Vec3,
    tau0: Option<&DVector<f64>>,
) -> Result<MomentumTorques, ControlError> {
    let n = model.dof();
    let rows = contacts.rows();
    if f_star.len() != contacts.points.len() {
        return Err(ControlError::DimensionMismatch(format!(
            "{} wrenches for {} contacts",
            f_star.len(),
            contacts.points.len()
        )));
    }
    let m = mass_matrix(model, q);
    let m_b = m.view((0, 0), (6, 6)).clone_owned();
    let m_bj = m.view((0, 6), (6, n)).clone_owned();
    let m_j = m.view((6, 6), (n, n)).clone_owned();
    let m_b_inv = m_b
        .try_inverse()
        .ok_or(ControlError::SingularBaseJacobian)?;
    // Schur complement: the joint block of the decoupled mass matrix.
    let m_j_bar = &m_j - m_bj.transpose() * &m_b_inv * &m_bj;
    let (p, pdot) = constraint_matrices(model, q, velocity, contacts);
    let j_b = p.columns(0, 6).clone_owned();
    let j_j = p.columns(6, n).clone_owned();
    let j_j_bar = &j_j - &j_b * &m_b_inv * &m_bj;
    let m_j_bar_inv = m_j_bar
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(ControlError::RankDeficient)?;
    let lambda = &j_j_bar * &m_j_bar_inv;
    let (lambda_pinv, rank) = pinv(&lambda);
    if rank < rows.min(n) {
        return Err(ControlError::RankDeficient);
    }

    // Bracket in original coordinates (the transform terms cancel):
    // Jc M^-1 (h - Jc^T f*) - Jcdot nu.
    let h = bias_forces(model, q, velocity, gravity);
    let m_inv = m
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(ControlError::RankDeficient)?;
    let mut f = DVector::zeros(rows);
    for (k, w) in f_star.iter().enumerate() {
        f.fixed_rows_mut::<6>(6 * k).copy_from(&w.to_vector());
    }
    let bracket = &p * &m_inv * (&h - p.transpose() * &f) - &pdot * velocity.to_vector();

    let mut torques = &lambda_pinv * &bracket;
    let nullspace = DMatrix::identity(n, n) - &lambda_pinv * &lambda;
    if let Some(tau0) = tau0 {
        torques += &nullspace * tau0;
    }
    Ok(MomentumTorques { torques, nullspace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        integrate_constrained, rnea, Acceleration, BaumgarteGains, ContactPoint, SimState,
        STANDARD_GRAVITY,
    };
    use crate::harness::models::hanging_chain;
    use crate::spatial::Vec3;
    use approx::assert_relative_eq;

    #[test]
    fn static_stance_wrench_is_the_weight() {
        let f = momentum_balance_wrench(&Vector6::zeros(), 4.0, &Matrix6::identity(), 9.81)
            .unwrap();
        assert_relative_eq!(f.force, Vec3::new(0.0, 0.0, 4.0 * 9.81), epsilon = 1e-12);
        assert_relative_eq!(f.moment, Vec3::zeros(), epsilon = 1e-12);
        // Doubling the mass doubles the gravity term exactly.
        let f2 = momentum_balance_wrench(&Vector6::zeros(), 8.0, &Matrix6::identity(), 9.81)
            .unwrap();
        assert_relative_eq!(f2.force, f.force * 2.0, epsilon = 1e-12);
    }

    #[test]
    fn statics_torques_match_gravity_compensation() {
        // A supported 3-link chain holding still: the torque law with the
        // static support wrench reproduces the inverse-dynamics torques.
        let model = hanging_chain(3, 1.0, 0.4);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = 0.3;
        q.joint_pos[1] = -0.5;
        q.joint_pos[2] = 0.2;
        let v = Velocity::zero(&model);
        let contacts = ContactSet::new(vec![ContactPoint::at_origin(0)]);
        // The static support wrench at the base contact.
        let needed = rnea(
            &model,
            &q,
            &v,
            &Acceleration::zero(&model),
            &STANDARD_GRAVITY,
            &[],
        );
        let f_star = ForceVector::new(needed.base_wrench.force, needed.base_wrench.moment);
        let out = momentum_torques(
            &model,
            &q,
            &v,
            &contacts,
            &[f_star],
            &STANDARD_GRAVITY,
            None,
        )
        .unwrap();
        assert!(
            (out.torques.clone() - needed.joint_torques.clone()).amax() <= 1e-8,
            "torques {:?} vs {:?}",
            out.torques,
            needed.joint_torques
        );
    }

    #[test]
    fn realized_contact_wrench_matches_f_star() {
        let model = hanging_chain(3, 1.0, 0.4);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = 0.3;
        q.joint_pos[1] = -0.4;
        q.joint_pos[2] = 0.6;
        let v = Velocity::zero(&model);
        let contacts = ContactSet::new(vec![ContactPoint::at_origin(0)]);
        let needed = rnea(
            &model,
            &q,
            &v,
            &Acceleration::zero(&model),
            &STANDARD_GRAVITY,
            &[],
        );
        let f_star = needed.base_wrench;
        let out = momentum_torques(
            &model,
            &q,
            &v,
            &contacts,
            &[f_star],
            &STANDARD_GRAVITY,
            None,
        )
        .unwrap();
        let trace = integrate_constrained(
            &model,
            &SimState { q, v },
            &STANDARD_GRAVITY,
            &contacts,
            BaumgarteGains::default(),
            1e-3,
            1,
            |_, _, _| out.torques.clone(),
        )
        .unwrap();
        let realized = &trace[0].1[0];
        assert!(
            (realized.to_vector() - f_star.to_vector()).amax() <= 1e-6,
            "realized {:?}",
            realized
        );
    }

    #[test]
    fn nullspace_term_preserves_realized_wrench() {
        let model = hanging_chain(3, 1.0, 0.4);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[1] = 0.8;
        let v = Velocity::zero(&model);
        let contacts = ContactSet::new(vec![ContactPoint::at_origin(0)]);
        let needed = rnea(
            &model,
            &q,
            &v,
            &Acceleration::zero(&model),
            &STANDARD_GRAVITY,
            &[],
        );
        let f_star = needed.base_wrench;
        let tau0 = DVector::from_vec(vec![0.5, -0.4, 0.9]);
        let base = momentum_torques(&model, &q, &v, &contacts, &[f_star], &STANDARD_GRAVITY, None)
            .unwrap();
        let with = momentum_torques(
            &model,
            &q,
            &v,
            &contacts,
            &[f_star],
            &STANDARD_GRAVITY,
            Some(&tau0),
        )
        .unwrap();
        let wrench_for = |tau: &DVector<f64>| {
            let step = crate::dynamics::integrate_constrained(
                &model,
                &SimState {
                    q: q.clone(),
                    v: v.clone(),
                },
                &STANDARD_GRAVITY,
                &contacts,
                BaumgarteGains::default(),
                1e-3,
                0,
                |_, _, _| tau.clone(),
            )
            .unwrap();
            step[0].1[0].to_vector()
        };
        let wa = wrench_for(&base.torques);
        let wb = wrench_for(&with.torques);
        assert!((wa - wb).amax() <= 1e-8);
    }
}
