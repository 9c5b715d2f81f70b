use nalgebra::{DMatrix, DVector};

use super::coupled::{coupled_wrench_map, CoupledSystem};
use super::feedback::{pinv, task_jacobian, task_jacobian_dot, TaskDefinition};
use super::projection::alpha_projection;
use super::ControlError;
use crate::dynamics::{bias_forces, mass_matrix};

#[derive(Clone, Copy, Debug)]
pub struct PartnerAwareGains {
    /// Velocity-error weight of the task energy.
    pub kd: f64,
    /// Integral-error weight.
    pub kp: f64,
    /// Dissipation gain multiplying the velocity error in the law.
    pub damping: f64,
}

#[derive(Clone, Debug)]
pub struct PartnerAwareResult {
    pub torques: DVector<f64>,
    /// External-agent torque component projected on the task-error
    /// direction.
    pub alpha: f64,
    /// Task energy `V = kd/2 |chi_err|^2 + kp/2 |int|^2`.
    pub lyapunov: f64,
    /// Closed-loop energy rate `-chi_err' K_D chi_err - max(0, alpha)
    /// |chi_err|`; non-positive by construction.
    pub lyapunov_rate: f64,
    pub chi_error: DVector<f64>,
}

/// Partner-aware torque law on the robot of a coupled system.
///
/// With the interaction wrenches written as an affine function of both
/// agents' torques, the law
/// `tau = -Delta^+ [Lambda + K_D chi_err + max(0, alpha) chi_par] + N tau0`
/// keeps the task energy non-increasing while leaving helpful external
/// torques uncancelled.
#[allow(clippy::too_many_arguments)]
pub fn partner_aware_torques(
    sys: &CoupledSystem,
    task: &TaskDefinition,
    chi_desired: &DVector<f64>,
    chi_desired_dot: &DVector<f64>,
    integral_error: &DVector<f64>,
    gains: &PartnerAwareGains,
    tau_ea: &DVector<f64>,
    tau0: Option<&DVector<f64>>,
) -> Result<PartnerAwareResult, ControlError> {
    let p = task.dim();
    let n_r = sys.robot_dofs();
    let map = coupled_wrench_map(sys)?;
    let selection = sys.robot_wrench_selection();
    let g1_r = &selection * &map.g1;
    let g2_r = &selection * &map.g2;
    let g3_r = &selection * &map.g3;

    let m = mass_matrix(&sys.robot.model, &sys.robot.q);
    let m_inv = m
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(ControlError::RankDeficient)?;
    let h = bias_forces(&sys.robot.model, &sys.robot.q, &sys.robot.v, &sys.gravity);
    let jx = task_jacobian(&sys.robot.model, &sys.robot.q, task);
    let jxd = task_jacobian_dot(&sys.robot.model, &sys.robot.q, &sys.robot.v, task);
    let jc_t = sys.robot_force_map();

    let jm = &jx * &m_inv;
    let task_force = &jm * &jc_t;

    let delta = (jm.columns(6, n_r) + &task_force * &g2_r) * gains.kd;
    let omega = (&task_force * &g1_r) * gains.kd;

    let nu_r = sys.robot.v.to_vector();
    let chi = &jx * &nu_r;
    let chi_error = &chi - chi_desired;
    let lambda = (&task_force * &g3_r - &jm * &h + &jxd * &nu_r - chi_desired_dot) * gains.kd
        + integral_error * gains.kp;

    // Projection of the external-agent contribution on the error direction.
    let contribution = &omega * tau_ea;
    let (alpha, chi_par) = match alpha_projection(&contribution, &chi_error) {
        Ok(dec) => (dec.alpha, dec.unit),
        Err(ControlError::DegenerateDirection) => (0.0, DVector::zeros(p)),
        Err(e) => return Err(e),
    };

    let (delta_pinv, rank) = pinv(&delta);
    if rank < p.min(n_r) {
        return Err(ControlError::RankDeficientTask);
    }
    let exploited = alpha.max(0.0);
    let mut torques =
        -(&delta_pinv * (&lambda + &chi_error * gains.damping + &chi_par * exploited));
    if let Some(tau0) = tau0 {
        let nullspace = DMatrix::identity(n_r, n_r) - &delta_pinv * &delta;
        torques += nullspace * tau0;
    }

    let lyapunov = 0.5 * gains.kd * chi_error.norm_squared()
        + 0.5 * gains.kp * integral_error.norm_squared();
    let lyapunov_rate = -gains.damping * chi_error.norm_squared() - exploited * chi_error.norm();

    Ok(PartnerAwareResult {
        torques,
        alpha,
        lyapunov,
        lyapunov_rate,
        chi_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::feedback::TaskRows;

    fn sys() -> CoupledSystem {
        crate::harness::models::coupled_twin_arms()
    }

    fn task() -> TaskDefinition {
        TaskDefinition {
            link: 2,
            rows: TaskRows::Custom(vec![0, 2]),
        }
    }

    #[test]
    fn zero_external_torque_zeroes_alpha() {
        let sys = sys();
        let task = task();
        let chi_d = DVector::from_vec(vec![0.05, 0.0]);
        let result = partner_aware_torques(
            &sys,
            &task,
            &chi_d,
            &DVector::zeros(2),
            &DVector::zeros(2),
            &PartnerAwareGains {
                kd: 1.0,
                kp: 0.5,
                damping: 2.0,
            },
            &DVector::zeros(2),
            None,
        )
        .unwrap();
        assert_eq!(result.alpha, 0.0);
        assert!(result.lyapunov_rate <= 0.0);
    }

    #[test]
    fn alpha_scales_linearly_with_external_torque() {
        let sys = sys();
        let task = task();
        let chi_d = DVector::from_vec(vec![0.05, -0.02]);
        let gains = PartnerAwareGains {
            kd: 1.0,
            kp: 0.5,
            damping: 2.0,
        };
        let tau_ea = DVector::from_vec(vec![0.8, -0.3]);
        let a1 = partner_aware_torques(
            &sys,
            &task,
            &chi_d,
            &DVector::zeros(2),
            &DVector::zeros(2),
            &gains,
            &tau_ea,
            None,
        )
        .unwrap()
        .alpha;
        let a3 = partner_aware_torques(
            &sys,
            &task,
            &chi_d,
            &DVector::zeros(2),
            &DVector::zeros(2),
            &gains,
            &(tau_ea * 3.0),
            None,
        )
        .unwrap()
        .alpha;
        assert!(
            (a3 - 3.0 * a1).abs() <= 1e-9,
            "alpha not linear: {a1} vs {a3}"
        );
    }
}
