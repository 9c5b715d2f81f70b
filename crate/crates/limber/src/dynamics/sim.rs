use nalgebra::{DMatrix, DVector};

use super::contacts::{constraint_matrices, ContactSet};
use super::matrices::{mass_matrix, rnea_generalized};
use super::rnea::Acceleration;
use super::DynamicsError;
use crate::kinematics::{forward_kinematics, Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{rotation_distance, ForceVector, Pose, Rotation, Vec3};

pub const STANDARD_GRAVITY: Vec3 = Vec3::new(0.0, 0.0, -9.81);

/// Baumgarte stabilization gains for the acceleration-level constraint.
#[derive(Clone, Copy, Debug)]
pub struct BaumgarteGains {
    pub velocity: f64,
    pub position: f64,
}

impl Default for BaumgarteGains {
    fn default() -> Self {
        Self {
            velocity: 20.0,
            position: 100.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimState {
    pub q: Configuration,
    pub v: Velocity,
}

/// One constrained-dynamics evaluation: the acceleration and the contact
/// wrenches (expressed at each contact frame origin in world axes).
#[derive(Clone, Debug)]
pub struct ConstrainedStep {
    pub acceleration: Acceleration,
    pub wrenches: Vec<ForceVector>,
}

/// Solves the KKT system `[M, -P^T; P, 0] [nudot; f] = [B tau - h; -rhs]`
/// with Baumgarte stabilization against the per-contact anchor poses.
pub fn constrained_dynamics(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    tau: &DVector<f64>,
    gravity: &Vec3,
    contacts: &ContactSet,
    anchors: &[Pose],
    gains: BaumgarteGains,
) -> Result<ConstrainedStep, DynamicsError> {
    let n = model.dof();
    let rows = contacts.rows();
    if anchors.len() != contacts.points.len() {
        return Err(DynamicsError::DimensionMismatch(format!(
            "{} anchors for {} contacts",
            anchors.len(),
            contacts.points.len()
        )));
    }
    let m = mass_matrix(model, q);
    let bias = rnea_generalized(
        model,
        q,
        velocity,
        &Acceleration::zero(model),
        gravity,
        &[],
    );
    let (p, pdot) = constraint_matrices(model, q, velocity, contacts);
    let nu = velocity.to_vector();

    let mut kkt = DMatrix::zeros(n + 6 + rows, n + 6 + rows);
    kkt.view_mut((0, 0), (n + 6, n + 6)).copy_from(&m);
    kkt.view_mut((0, n + 6), (n + 6, rows))
        .copy_from(&(-p.transpose()));
    kkt.view_mut((n + 6, 0), (rows, n + 6)).copy_from(&p);

    let mut rhs = DVector::zeros(n + 6 + rows);
    {
        let mut top = rhs.rows_mut(0, n + 6);
        top.copy_from(&(-&bias));
        let mut joint_rows = top.rows_mut(6, n);
        joint_rows += tau;
    }
    // Constraint rows: P nudot = -Pdot nu - kv (P nu) - kp err.
    let drift = &pdot * &nu;
    let vel_err = &p * &nu;
    let poses = forward_kinematics(model, q);
    for (k, (point, anchor)) in contacts.points.iter().zip(anchors.iter()).enumerate() {
        let current = point.world_pose(&poses);
        let pos_err = current.position - anchor.position;
        let ori_err = rotation_distance(&anchor.rotation, &current.rotation);
        for i in 0..3 {
            rhs[n + 6 + 6 * k + i] = -drift[6 * k + i]
                - gains.velocity * vel_err[6 * k + i]
                - gains.position * pos_err[i];
            rhs[n + 6 + 6 * k + 3 + i] = -drift[6 * k + 3 + i]
                - gains.velocity * vel_err[6 * k + 3 + i]
                - gains.position * ori_err[i];
        }
    }

    let solution = kkt
        .lu()
        .solve(&rhs)
        .ok_or_else(|| DynamicsError::SingularKkt("constrained dynamics".into()))?;
    let acceleration = Acceleration::from_vector(&solution.rows(0, n + 6).clone_owned());
    let wrenches = (0..contacts.points.len())
        .map(|k| {
            ForceVector::new(
                Vec3::new(
                    solution[n + 6 + 6 * k],
                    solution[n + 6 + 6 * k + 1],
                    solution[n + 6 + 6 * k + 2],
                ),
                Vec3::new(
                    solution[n + 6 + 6 * k + 3],
                    solution[n + 6 + 6 * k + 4],
                    solution[n + 6 + 6 * k + 5],
                ),
            )
        })
        .collect();
    Ok(ConstrainedStep {
        acceleration,
        wrenches,
    })
}

/// Fourth-order Munthe-Kaas step on (position, rotation chart, joints).
///
/// The base rotation is integrated on a local exponential chart around the
/// step's starting rotation, with the second-order dexpinv correction, which
/// preserves the integrator's order on SO(3).
fn rk4_step<F>(state: &SimState, dt: f64, mut accel: F) -> SimState
where
    F: FnMut(&Configuration, &Velocity) -> Acceleration,
{
    #[derive(Clone)]
    struct Chart {
        p: Vec3,
        theta: Vec3,
        s: DVector<f64>,
        v: DVector<f64>,
    }
    let r0 = state.q.base_pose.rotation;
    let chart_config = |c: &Chart| -> Configuration {
        Configuration::new(
            Pose::new(Rotation::exp(&c.theta) * r0, c.p),
            c.s.clone(),
        )
    };
    let deriv = |c: &Chart, accel: &mut F| -> (Chart, Acceleration) {
        let q = chart_config(c);
        let velocity = Velocity::from_vector(&c.v);
        let a = accel(&q, &velocity);
        let w = velocity.base.angular;
        // dexpinv up to second order: theta_dot = w - theta x w / 2 +
        // theta x (theta x w) / 12.
        let theta_dot = w - c.theta.cross(&w) * 0.5 + c.theta.cross(&c.theta.cross(&w)) / 12.0;
        (
            Chart {
                p: velocity.base.linear,
                theta: theta_dot,
                s: velocity.joint_vel.clone(),
                v: a.to_vector(),
            },
            a,
        )
    };
    let add = |c: &Chart, d: &Chart, h: f64| -> Chart {
        Chart {
            p: c.p + d.p * h,
            theta: c.theta + d.theta * h,
            s: &c.s + &d.s * h,
            v: &c.v + &d.v * h,
        }
    };
    let y0 = Chart {
        p: state.q.base_pose.position,
        theta: Vec3::zeros(),
        s: state.q.joint_pos.clone(),
        v: state.v.to_vector(),
    };
    let (k1, _) = deriv(&y0, &mut accel);
    let (k2, _) = deriv(&add(&y0, &k1, dt / 2.0), &mut accel);
    let (k3, _) = deriv(&add(&y0, &k2, dt / 2.0), &mut accel);
    let (k4, _) = deriv(&add(&y0, &k3, dt), &mut accel);
    let mut y = y0.clone();
    y.p += (k1.p + k2.p * 2.0 + k3.p * 2.0 + k4.p) * (dt / 6.0);
    y.theta += (k1.theta + k2.theta * 2.0 + k3.theta * 2.0 + k4.theta) * (dt / 6.0);
    y.s += (&k1.s + &k2.s * 2.0 + &k3.s * 2.0 + &k4.s) * (dt / 6.0);
    y.v += (&k1.v + &k2.v * 2.0 + &k3.v * 2.0 + &k4.v) * (dt / 6.0);
    SimState {
        q: chart_config(&y),
        v: Velocity::from_vector(&y.v),
    }
}

/// Integrates unconstrained dynamics under a torque policy.
pub fn integrate_free<F>(
    model: &FloatingBaseModel,
    state: &SimState,
    gravity: &Vec3,
    dt: f64,
    steps: usize,
    mut torque: F,
) -> Vec<SimState>
where
    F: FnMut(f64, &Configuration, &Velocity) -> DVector<f64>,
{
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.clone());
    let mut current = state.clone();
    for k in 0..steps {
        let t = k as f64 * dt;
        current = rk4_step(&current, dt, |q, v| {
            let tau = torque(t, q, v);
            super::matrices::forward_dynamics(model, q, v, &tau, gravity, &[])
        });
        out.push(current.clone());
    }
    out
}

/// Integrates constrained dynamics under a torque policy; anchors are taken
/// from the initial contact poses.
#[allow(clippy::too_many_arguments)]
pub fn integrate_constrained<F>(
    model: &FloatingBaseModel,
    state: &SimState,
    gravity: &Vec3,
    contacts: &ContactSet,
    gains: BaumgarteGains,
    dt: f64,
    steps: usize,
    mut torque: F,
) -> Result<Vec<(SimState, Vec<ForceVector>)>, DynamicsError>
where
    F: FnMut(f64, &Configuration, &Velocity) -> DVector<f64>,
{
    let poses = forward_kinematics(model, &state.q);
    let anchors: Vec<Pose> = contacts
        .points
        .iter()
        .map(|pt| pt.world_pose(&poses))
        .collect();
    let mut out = Vec::with_capacity(steps + 1);
    let first = constrained_dynamics(
        model,
        &state.q,
        &state.v,
        &torque(0.0, &state.q, &state.v),
        gravity,
        contacts,
        &anchors,
        gains,
    )?;
    out.push((state.clone(), first.wrenches));
    let mut current = state.clone();
    for k in 0..steps {
        let t = k as f64 * dt;
        current = rk4_step(&current, dt, |q, v| {
            let tau = torque(t, q, v);
            constrained_dynamics(model, q, v, &tau, gravity, contacts, &anchors, gains)
                .map(|s| s.acceleration)
                .unwrap_or_else(|_| Acceleration::zero(model))
        });
        let tau = torque((k + 1) as f64 * dt, &current.q, &current.v);
        let step = constrained_dynamics(
            model, &current.q, &current.v, &tau, gravity, contacts, &anchors, gains,
        )?;
        out.push((current.clone(), step.wrenches));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::momentum::total_momentum;
    use crate::dynamics::ContactPoint;
    use crate::harness::models::{five_link_floating_chain, hanging_chain};
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    #[test]
    fn free_fall_momentum_follows_gravity() {
        let model = five_link_floating_chain();
        let q = Configuration::neutral(&model);
        let mut v = Velocity::zero(&model);
        v.joint_vel[0] = 0.8;
        v.base.angular = Vec3::new(0.1, -0.2, 0.3);
        let dt = 1e-3;
        let steps = 500;
        let states = integrate_free(
            &model,
            &SimState { q, v },
            &STANDARD_GRAVITY,
            dt,
            steps,
            |_, _, _| DVector::zeros(model.dof()),
        );
        let l0 = total_momentum(&model, &states[0].q, &states[0].v);
        let l1 = total_momentum(
            &model,
            &states[steps].q,
            &states[steps].v,
        );
        let expected = l0.force + STANDARD_GRAVITY * model.total_mass() * (dt * steps as f64);
        assert!(
            (l1.force - expected).norm() <= 1e-6 * expected.norm().max(1.0),
            "ballistic drift {:.3e}",
            (l1.force - expected).norm()
        );
    }

    #[test]
    fn torque_free_chain_conserves_momentum() {
        let model = five_link_floating_chain();
        let q = Configuration::neutral(&model);
        let mut v = Velocity::zero(&model);
        v.base.linear = Vec3::new(0.05, 0.0, 0.1);
        v.base.angular = Vec3::new(0.4, -0.3, 0.5);
        v.joint_vel = DVector::from_vec(vec![0.7, -0.9, 0.4, 0.6]);
        let dt = 1e-3;
        let steps = 5000; // 5 seconds
        let states = integrate_free(
            &model,
            &SimState { q, v },
            &Vec3::zeros(),
            dt,
            steps,
            |_, _, _| DVector::zeros(model.dof()),
        );
        let l0 = total_momentum(&model, &states[0].q, &states[0].v).to_vector();
        let l1 = total_momentum(&model, &states[steps].q, &states[steps].v).to_vector();
        let rel = (l1 - l0.clone()).norm() / l0.norm();
        assert!(rel <= 1e-6, "momentum drift {rel:.3e}");
    }

    #[test]
    fn welded_chain_stays_put_under_gravity_compensation() {
        let model = hanging_chain(2, 1.0, 0.5);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = 0.4;
        q.joint_pos[1] = -0.2;
        let contacts = ContactSet::new(vec![ContactPoint::at_origin(0)]);
        let q0 = q.clone();
        let trace = integrate_constrained(
            &model,
            &SimState {
                q,
                v: Velocity::zero(&model),
            },
            &STANDARD_GRAVITY,
            &contacts,
            BaumgarteGains::default(),
            1e-3,
            200,
            |_, qq, vv| {
                // Gravity compensation from inverse dynamics.
                crate::dynamics::rnea(
                    &model,
                    qq,
                    vv,
                    &Acceleration::zero(&model),
                    &STANDARD_GRAVITY,
                    &[],
                )
                .joint_torques
            },
        )
        .unwrap();
        let last = &trace.last().unwrap().0;
        assert_relative_eq!(
            (last.q.joint_pos.clone() - q0.joint_pos).norm(),
            0.0,
            epsilon = 1e-6
        );
        assert_relative_eq!(
            (last.q.base_pose.position - q0.base_pose.position).norm(),
            0.0,
            epsilon = 1e-6
        );
        // The weld wrench carries the whole weight.
        let wrench = &trace.last().unwrap().1[0];
        assert_relative_eq!(
            wrench.force.z,
            model.total_mass() * 9.81,
            epsilon = 1e-6
        );
    }
}
