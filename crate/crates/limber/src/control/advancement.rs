use nalgebra::DVector;

use super::{ControlError, Trajectory};

/// State of the trajectory-advancement parameter.
///
/// The rate stays in `[1, psi_dot_upper]`: the reference never retreats and
/// never advances faster than the bound. The parameter acceleration is
/// recovered by a one-step-delayed finite difference smoothed by a
/// first-order low-pass, which breaks the algebraic loop in the reference
/// acceleration.
#[derive(Clone, Debug)]
pub struct AdvancementState {
    pub psi: f64,
    pub psi_dot: f64,
    pub psi_ddot: f64,
    pub psi_dot_upper: f64,
    lowpass_gain: f64,
    prev_psi_dot: f64,
}

impl AdvancementState {
    /// `cutoff_hz` is the low-pass corner for the psi-acceleration estimate
    /// at sample time `dt`.
    pub fn new(psi_dot_upper: f64, cutoff_hz: f64, dt: f64) -> Self {
        assert!(psi_dot_upper >= 1.0, "upper bound must allow nominal rate");
        let rc = 1.0 / (2.0 * std::f64::consts::PI * cutoff_hz);
        Self {
            psi: 0.0,
            psi_dot: 1.0,
            psi_ddot: 0.0,
            psi_dot_upper,
            lowpass_gain: dt / (dt + rc),
            prev_psi_dot: 1.0,
        }
    }
}

/// One advancement update:
/// `psi_dot = clamp(xdot . d_psi x / |d_psi x|^2, 1, upper)`, then the
/// parameter integrates at the new rate.
pub fn advancement_update(
    state: &AdvancementState,
    x_dot: &DVector<f64>,
    trajectory: &dyn Trajectory,
    dt: f64,
) -> Result<AdvancementState, ControlError> {
    let tangent = trajectory.first_derivative(state.psi);
    let tangent_norm2 = tangent.norm_squared();
    if tangent_norm2 <= 1e-18 {
        return Err(ControlError::DegenerateTangent);
    }
    if x_dot.len() != tangent.len() {
        return Err(ControlError::DimensionMismatch(format!(
            "velocity dim {} vs trajectory dim {}",
            x_dot.len(),
            tangent.len()
        )));
    }
    let ratio = x_dot.dot(&tangent) / tangent_norm2;
    let psi_dot = ratio.clamp(1.0, state.psi_dot_upper);
    // One-step-delayed derivative of the rate, then low-pass.
    let raw_ddot = (state.psi_dot - state.prev_psi_dot) / dt;
    let psi_ddot = state.psi_ddot + state.lowpass_gain * (raw_ddot - state.psi_ddot);
    Ok(AdvancementState {
        psi: state.psi + psi_dot * dt,
        psi_dot,
        psi_ddot,
        psi_dot_upper: state.psi_dot_upper,
        lowpass_gain: state.lowpass_gain,
        prev_psi_dot: state.psi_dot,
    })
}
