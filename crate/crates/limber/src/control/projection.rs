use nalgebra::DVector;

use super::ControlError;

/// Values of alpha below this magnitude are treated as zero, absorbing the
/// noise floor of estimated interaction terms.
pub const ALPHA_DEADZONE: f64 = 1e-3;

/// Decomposition of a task-space vector along a direction:
/// `input = alpha * unit + perpendicular` with `unit . perpendicular = 0`.
#[derive(Clone, Debug)]
pub struct WrenchDecomposition {
    pub alpha: f64,
    /// Unit vector along the decomposition direction.
    pub unit: DVector<f64>,
    /// Remainder orthogonal to `unit` (up to the dead-zone adjustment).
    pub perpendicular: DVector<f64>,
}

impl WrenchDecomposition {
    pub fn reconstruct(&self) -> DVector<f64> {
        &self.unit * self.alpha + &self.perpendicular
    }
}

/// Projects `input` on `direction`: `alpha = direction . input / |direction|`.
///
/// Alpha magnitudes below [`ALPHA_DEADZONE`] are zeroed; the perpendicular
/// remainder always reconstructs the input exactly.
pub fn alpha_projection(
    input: &DVector<f64>,
    direction: &DVector<f64>,
) -> Result<WrenchDecomposition, ControlError> {
    let norm = direction.norm();
    if norm <= 1e-9 {
        return Err(ControlError::DegenerateDirection);
    }
    if input.len() != direction.len() {
        return Err(ControlError::DimensionMismatch(format!(
            "input dim {} vs direction dim {}",
            input.len(),
            direction.len()
        )));
    }
    let unit = direction / norm;
    let mut alpha = unit.dot(input);
    if alpha.abs() < ALPHA_DEADZONE {
        alpha = 0.0;
    }
    let perpendicular = input - &unit * alpha;
    Ok(WrenchDecomposition {
        alpha,
        unit,
        perpendicular,
    })
}

/// Which helpfulness predicate gates the correction term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HelpfulnessConvention {
    /// Decomposition along the desired velocity; assistance helps when it
    /// pushes along the path (`alpha > 0`).
    AlongDesiredVelocity,
    /// Decomposition along the velocity error; assistance helps when it
    /// drives the error down (`alpha <= 0`).
    OpposingVelocityError,
}

impl HelpfulnessConvention {
    pub fn is_helpful(&self, alpha: f64) -> bool {
        match self {
            HelpfulnessConvention::AlongDesiredVelocity => alpha > 0.0,
            HelpfulnessConvention::OpposingVelocityError => alpha <= 0.0,
        }
    }
}

/// PD-plus-feedforward desired dynamics with the gated correction term:
/// `xddot* = xddot_d - K_D edot - K_P int(edot) + [alpha * unit]` where the
/// bracket applies only when the convention's helpfulness predicate holds.
pub fn updated_desired_dynamics(
    xddot_d: &DVector<f64>,
    velocity_error: &DVector<f64>,
    integral_error: &DVector<f64>,
    kd: f64,
    kp: f64,
    correction: Option<&WrenchDecomposition>,
    convention: HelpfulnessConvention,
) -> DVector<f64> {
    let mut out = xddot_d - velocity_error * kd - integral_error * kp;
    if let Some(dec) = correction {
        if convention.is_helpful(dec.alpha) {
            out += &dec.unit * dec.alpha;
        }
    }
    out
}
