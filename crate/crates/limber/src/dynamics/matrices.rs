use nalgebra::{DMatrix, DVector};

use super::rnea::{rnea, Acceleration};
use crate::kinematics::{Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{ForceVector, Vec3};

/// Stacks an inverse-dynamics result into the generalized-force layout
/// `[base force, base moment, joint torques]`.
fn stack(result: &super::RneaResult, n: usize) -> DVector<f64> {
    let mut out = DVector::zeros(n + 6);
    out.fixed_rows_mut::<3>(0).copy_from(&result.base_wrench.force);
    out.fixed_rows_mut::<3>(3)
        .copy_from(&result.base_wrench.moment);
    out.rows_mut(6, n).copy_from(&result.joint_torques);
    out
}

/// Generalized forces `M(q) nudot + h(q, nu) - (external terms)` evaluated
/// by one inverse-dynamics sweep.
pub fn rnea_generalized(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    acceleration: &Acceleration,
    gravity: &Vec3,
    external: &[ForceVector],
) -> DVector<f64> {
    stack(
        &rnea(model, q, velocity, acceleration, gravity, external),
        model.dof(),
    )
}

/// Mass matrix by n+6 unit-acceleration inverse-dynamics sweeps at zero
/// velocity and zero gravity.
pub fn mass_matrix(model: &FloatingBaseModel, q: &Configuration) -> DMatrix<f64> {
    let n = model.dof();
    let zero_vel = Velocity::zero(model);
    let mut m = DMatrix::zeros(n + 6, n + 6);
    for col in 0..n + 6 {
        let mut unit = DVector::zeros(n + 6);
        unit[col] = 1.0;
        let acc = Acceleration::from_vector(&unit);
        let column = rnea_generalized(model, q, &zero_vel, &acc, &Vec3::zeros(), &[]);
        m.column_mut(col).copy_from(&column);
    }
    m
}

/// Bias forces `h = C(q, nu) nu + G(q)`.
pub fn bias_forces(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    gravity: &Vec3,
) -> DVector<f64> {
    rnea_generalized(
        model,
        q,
        velocity,
        &Acceleration::zero(model),
        gravity,
        &[],
    )
}

/// Unconstrained forward dynamics: solves `M nudot = B tau + sum J^T f - h`.
pub fn forward_dynamics(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    tau: &DVector<f64>,
    gravity: &Vec3,
    external: &[ForceVector],
) -> Acceleration {
    let n = model.dof();
    let m = mass_matrix(model, q);
    // h - (external generalized forces), in one sweep with nudot = 0.
    let bias = rnea_generalized(
        model,
        q,
        velocity,
        &Acceleration::zero(model),
        gravity,
        external,
    );
    let mut rhs = -bias;
    {
        let mut rows = rhs.rows_mut(6, n);
        rows += tau;
    }
    let nudot = m
        .clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .unwrap_or_else(|| m.lu().solve(&rhs).expect("mass matrix invertible"));
    Acceleration::from_vector(&nudot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::models::{five_link_floating_chain, random_state};
    use crate::model::{FloatingBaseModel, Link};
    use crate::spatial::{Mat3, SpatialInertia};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_body_mass_matrix_is_spatial_inertia() {
        let inertia = SpatialInertia::new(
            2.0,
            Vec3::zeros(),
            Mat3::from_diagonal(&Vec3::new(0.01, 0.02, 0.03)),
        );
        let model = FloatingBaseModel::new(
            "body".into(),
            vec![Link {
                name: "body".into(),
                shape: None,
                inertia,
            }],
            vec![],
        )
        .unwrap();
        let q = Configuration::neutral(&model);
        let m = mass_matrix(&model, &q);
        let dense = DMatrix::from_fn(6, 6, |r, c| inertia.to_matrix()[(r, c)]);
        assert!((m - dense).norm() <= 1e-12);
    }

    #[test]
    fn mass_matrix_symmetry_on_random_states() {
        let model = five_link_floating_chain();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (q, _) = random_state(&model, &mut rng);
            let m = mass_matrix(&model, &q);
            assert!((m.clone() - m.transpose()).norm() <= 1e-9);
            assert!(m.cholesky().is_some(), "mass matrix not positive definite");
        }
    }

    #[test]
    fn double_pendulum_mass_matrix_matches_closed_form() {
        // Planar double pendulum with point masses folded into rods: compare
        // the joint-joint block against the standard two-link formula with
        // m1 = m2 = m, lc = l/2, I = m l^2 / 12.
        let (m, l) = (1.0, 1.0);
        let model = crate::harness::models::hanging_chain(2, m, l);
        let q2 = 0.7;
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = 0.3;
        q.joint_pos[1] = q2;
        let full = mass_matrix(&model, &q);
        let jj = full.view((6, 6), (2, 2)).clone_owned();
        let ic = m * l * l / 12.0;
        let lc = l / 2.0;
        let m11 = ic + m * lc * lc + ic + m * (l * l + lc * lc + 2.0 * l * lc * q2.cos());
        let m12 = ic + m * (lc * lc + l * lc * q2.cos());
        let m22 = ic + m * lc * lc;
        assert_relative_eq!(jj[(0, 0)], m11, epsilon = 1e-10);
        assert_relative_eq!(jj[(0, 1)], m12, epsilon = 1e-10);
        assert_relative_eq!(jj[(1, 0)], m12, epsilon = 1e-10);
        assert_relative_eq!(jj[(1, 1)], m22, epsilon = 1e-10);
    }

    #[test]
    fn rnea_equals_mass_matrix_times_acceleration_plus_bias() {
        let model = five_link_floating_chain();
        let gravity = Vec3::new(0.0, 0.0, -9.81);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let (q, velocity) = random_state(&model, &mut rng);
            let (_, accel) = random_state(&model, &mut rng);
            let accel = Acceleration::new(accel.base, accel.joint_vel.clone());
            let direct =
                rnea_generalized(&model, &q, &velocity, &accel, &gravity, &[]);
            let assembled = mass_matrix(&model, &q) * accel.to_vector()
                + bias_forces(&model, &q, &velocity, &gravity);
            assert!(
                (direct.clone() - assembled.clone()).amax() <= 1e-8,
                "identity residual {:.3e}",
                (direct - assembled).amax()
            );
        }
    }
}
