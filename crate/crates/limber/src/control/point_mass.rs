use nalgebra::DVector;

/// State of the unit-mass double integrator `xddot = u + f_ext`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMassState {
    pub position: DVector<f64>,
    pub velocity: DVector<f64>,
}

impl PointMassState {
    pub fn at_rest(dim: usize) -> Self {
        Self {
            position: DVector::zeros(dim),
            velocity: DVector::zeros(dim),
        }
    }
}

/// Semi-implicit Euler step of the double integrator.
pub fn point_mass_step(
    state: &PointMassState,
    u: &DVector<f64>,
    f_ext: &DVector<f64>,
    dt: f64,
) -> PointMassState {
    assert!(dt > 0.0, "dt must be positive");
    let velocity = &state.velocity + (u + f_ext) * dt;
    let position = &state.position + &velocity * dt;
    PointMassState { position, velocity }
}

/// Tracking-energy Lyapunov value
/// `V = |edot|^2 / 2 + kp |int(edot)|^2 / 2`.
pub fn lyapunov_value(velocity_error: &DVector<f64>, integral_error: &DVector<f64>, kp: f64) -> f64 {
    0.5 * velocity_error.norm_squared() + 0.5 * kp * integral_error.norm_squared()
}

/// Closed-loop Lyapunov rate under the gated desired dynamics:
/// `Vdot = -kd |edot|^2 + edot . correction`.
pub fn lyapunov_rate(velocity_error: &DVector<f64>, kd: f64, correction: &DVector<f64>) -> f64 {
    -kd * velocity_error.norm_squared() + velocity_error.dot(correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coasting_advances_by_velocity_times_dt() {
        let state = PointMassState {
            position: DVector::from_vec(vec![0.0]),
            velocity: DVector::from_vec(vec![1.0]),
        };
        let zero = DVector::zeros(1);
        let next = point_mass_step(&state, &zero, &zero, 0.01);
        assert_relative_eq!(next.position[0], 0.01, epsilon = 1e-15);
        assert_relative_eq!(next.velocity[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cancelling_force_freezes_velocity() {
        let state = PointMassState {
            position: DVector::from_vec(vec![0.2]),
            velocity: DVector::from_vec(vec![-0.4]),
        };
        let u = DVector::from_vec(vec![3.0]);
        let f = DVector::from_vec(vec![-3.0]);
        let next = point_mass_step(&state, &u, &f, 0.005);
        assert_relative_eq!(next.velocity[0], -0.4, epsilon = 1e-15);
    }

    #[test]
    fn pd_step_response_matches_second_order_ode() {
        // Critically damped PD on position: xdd = -kd xd - kp (x - 1);
        // compare against the closed form x(t) = 1 - (1 + w t) e^(-w t).
        let w = 4.0;
        let (kp, kd) = (w * w, 2.0 * w);
        let dt = 1e-4;
        let mut state = PointMassState::at_rest(1);
        let zero = DVector::zeros(1);
        let steps = 20_000; // 2 seconds
        for _ in 0..steps {
            let u = DVector::from_vec(vec![
                -kd * state.velocity[0] - kp * (state.position[0] - 1.0),
            ]);
            state = point_mass_step(&state, &u, &zero, dt);
        }
        let t = steps as f64 * dt;
        let exact = 1.0 - (1.0 + w * t) * (-w * t).exp();
        assert!(
            (state.position[0] - exact).abs() <= 1e-4,
            "step response {} vs {}",
            state.position[0],
            exact
        );
    }
}
