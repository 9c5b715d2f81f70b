use super::matrices::{mass_matrix, rnea_generalized};
use super::rnea::Acceleration;
use crate::kinematics::{forward_kinematics, link_velocities, Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{ForceVector, Vec3};

/// Center of mass of the whole model in world coordinates.
pub fn center_of_mass(model: &FloatingBaseModel, q: &Configuration) -> Vec3 {
    let poses = forward_kinematics(model, q);
    let mut weighted = Vec3::zeros();
    let mut mass = 0.0;
    for (link, pose) in model.links().iter().zip(poses.iter()) {
        let m = link.inertia.mass();
        if m > 0.0 {
            weighted += pose.transform_point(link.inertia.com()) * m;
            mass += m;
        }
    }
    weighted / mass
}

/// World-frame velocity of the center of mass.
pub fn com_velocity(model: &FloatingBaseModel, q: &Configuration, velocity: &Velocity) -> Vec3 {
    let poses = forward_kinematics(model, q);
    let vels = link_velocities(model, q, velocity);
    let mut weighted = Vec3::zeros();
    let mut mass = 0.0;
    for ((link, pose), vel) in model.links().iter().zip(poses.iter()).zip(vels.iter()) {
        let m = link.inertia.mass();
        if m > 0.0 {
            let r = pose.rotation.rotate(link.inertia.com());
            weighted += (vel.linear + vel.angular.cross(&r)) * m;
            mass += m;
        }
    }
    weighted / mass
}

/// Momentum at the base origin in world axes: the first six generalized
/// momenta `(M nu)[0..6]`.
fn momentum_at_base(model: &FloatingBaseModel, q: &Configuration, velocity: &Velocity) -> ForceVector {
    let p = mass_matrix(model, q) * velocity.to_vector();
    ForceVector::new(Vec3::new(p[0], p[1], p[2]), Vec3::new(p[3], p[4], p[5]))
}

/// Total 6D momentum about the center of mass with world orientation
/// (the centroidal frame): linear part `m * com velocity`, angular part the
/// angular momentum about the CoM.
pub fn total_momentum(model: &FloatingBaseModel, q: &Configuration, velocity: &Velocity) -> ForceVector {
    let at_base = momentum_at_base(model, q, velocity);
    let r = center_of_mass(model, q) - q.base_pose.position;
    ForceVector::new(at_base.force, at_base.moment - r.cross(&at_base.force))
}

/// Analytic rate of change of [`total_momentum`] along `(q, nu, nudot)`.
///
/// Uses a zero-gravity inverse-dynamics sweep for the momentum rate at the
/// base and transports it to the (moving) centroidal frame.
pub fn momentum_rate(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    acceleration: &Acceleration,
) -> ForceVector {
    // The zero-gravity sweep yields the instantaneous net wrench about the
    // base origin; transporting it to the CoM gives the momentum rate there
    // (the moving-CoM correction -v_c x P vanishes because P = m v_c).
    let stacked = rnea_generalized(model, q, velocity, acceleration, &Vec3::zeros(), &[]);
    let net = ForceVector::new(
        Vec3::new(stacked[0], stacked[1], stacked[2]),
        Vec3::new(stacked[3], stacked[4], stacked[5]),
    );
    let r = center_of_mass(model, q) - q.base_pose.position;
    ForceVector::new(net.force, net.moment - r.cross(&net.force))
}

/// Residual of the momentum balance in the centroidal frame:
/// `Ldot - sum(f_i) - [m g; 0]`, with the contact wrenches already expressed
/// in the centroidal frame. Zero for dynamically consistent inputs.
pub fn momentum_rate_balance(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    acceleration: &Acceleration,
    contact_wrenches: &[ForceVector],
    gravity: &Vec3,
) -> nalgebra::Vector6<f64> {
    let ldot = momentum_rate(model, q, velocity, acceleration);
    let mut residual = ldot;
    for w in contact_wrenches {
        residual = residual - *w;
    }
    residual = residual - ForceVector::new(gravity * model.total_mass(), Vec3::zeros());
    residual.to_vector()
}

/// Analytic world-frame acceleration of the center of mass.
pub fn com_acceleration_from(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    acceleration: &Acceleration,
) -> Vec3 {
    momentum_rate(model, q, velocity, acceleration).force / model.total_mass()
}

/// Convenience: maps a wrench expressed at `point` (world axes) into the
/// centroidal frame of the current configuration.
pub fn wrench_to_centroidal(
    model: &FloatingBaseModel,
    q: &Configuration,
    point: &Vec3,
    wrench: &ForceVector,
) -> ForceVector {
    let com = center_of_mass(model, q);
    ForceVector::new(
        wrench.force,
        wrench.moment + (point - com).cross(&wrench.force),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::models::{five_link_floating_chain, random_state};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_velocity_zero_momentum() {
        let model = five_link_floating_chain();
        let q = Configuration::neutral(&model);
        let l = total_momentum(&model, &q, &Velocity::zero(&model));
        assert_relative_eq!(l.to_vector().norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_momentum_is_mass_times_com_velocity() {
        let model = five_link_floating_chain();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (q, velocity) = random_state(&model, &mut rng);
        let l = total_momentum(&model, &q, &velocity);
        let expected = com_velocity(&model, &q, &velocity) * model.total_mass();
        assert_relative_eq!(l.force, expected, epsilon = 1e-9);
        // And against finite differences of the CoM position.
        let h = 1e-6;
        let com_plus = center_of_mass(&model, &q.integrated(&velocity, h));
        let com_minus = center_of_mass(&model, &q.integrated(&velocity, -h));
        let fd = (com_plus - com_minus) / (2.0 * h) * model.total_mass();
        assert!((l.force - fd).norm() <= 1e-6 * fd.norm().max(1.0));
    }

    #[test]
    fn momentum_rate_matches_finite_differences() {
        let model = five_link_floating_chain();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let (q, velocity) = random_state(&model, &mut rng);
        let (_, accel) = random_state(&model, &mut rng);
        let accel = Acceleration::new(accel.base, accel.joint_vel.clone());
        let ldot = momentum_rate(&model, &q, &velocity, &accel);
        let h = 1e-6;
        let q_plus = q.integrated(&velocity, h);
        let v_plus = Velocity::from_vector(&(velocity.to_vector() + accel.to_vector() * h));
        let q_minus = q.integrated(&velocity, -h);
        let v_minus = Velocity::from_vector(&(velocity.to_vector() - accel.to_vector() * h));
        let fd = (total_momentum(&model, &q_plus, &v_plus).to_vector()
            - total_momentum(&model, &q_minus, &v_minus).to_vector())
            / (2.0 * h);
        assert!(
            (ldot.to_vector() - fd.clone()).norm() <= 1e-5 * fd.norm().max(1.0),
            "ldot {:?} vs fd {:?}",
            ldot.to_vector(),
            fd
        );
    }
}
