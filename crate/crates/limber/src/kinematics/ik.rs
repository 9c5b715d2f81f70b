use nalgebra::{DMatrix, DVector};

use super::jacobian::frame_jacobian_with_poses;
use super::{forward_kinematics, Configuration, KinematicsError, TargetSet, Velocity};
use crate::model::FloatingBaseModel;

/// Pseudoinverse regularization for the velocity-level solve.
#[derive(Clone, Copy, Debug)]
pub enum DampingPolicy {
    /// No damping; the solve fails on singular Jacobians.
    None,
    /// Constant damping, raised adaptively when the smallest singular value
    /// drops below the monitor threshold.
    Adaptive { base: f64 },
}

impl Default for DampingPolicy {
    fn default() -> Self {
        // The pseudoinverse regularization the source formulation leaves
        // unspecified.
        DampingPolicy::Adaptive { base: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub struct IkOptions {
    pub damping: DampingPolicy,
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub enforce_limits: bool,
}

impl Default for IkOptions {
    fn default() -> Self {
        Self {
            damping: DampingPolicy::default(),
            max_iterations: 100,
            residual_tol: 1e-10,
            enforce_limits: false,
        }
    }
}

/// State advanced by the dynamical inverse-kinematics loop.
#[derive(Clone, Debug)]
pub struct IkState {
    pub config: Configuration,
    /// Positive diagonal gain, one entry per residual row.
    pub gain: DVector<f64>,
    pub residual: DVector<f64>,
}

impl IkState {
    pub fn new(config: Configuration, targets: &TargetSet, gain: f64) -> Self {
        assert!(gain > 0.0, "gain must be positive");
        Self {
            config,
            gain: DVector::from_element(6 * targets.len(), gain),
            residual: DVector::zeros(6 * targets.len()),
        }
    }
}

/// Weighted damped-least-squares solve of `J nu = b`.
fn damped_solve(
    j: &DMatrix<f64>,
    b: &DVector<f64>,
    weights: &DVector<f64>,
    damping: DampingPolicy,
) -> Result<DVector<f64>, KinematicsError> {
    let mut jw = j.clone();
    let mut bw = b.clone();
    for (row, w) in weights.iter().enumerate() {
        let sw = w.sqrt();
        jw.row_mut(row).scale_mut(sw);
        bw[row] *= sw;
    }
    let svd = jw.svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v_t");
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    let lambda2 = match damping {
        DampingPolicy::None => {
            if sigma_max <= 0.0 || sigma_min / sigma_max < 1e-10 {
                return Err(KinematicsError::SingularJacobian);
            }
            0.0
        }
        DampingPolicy::Adaptive { base } => {
            // Smallest-singular-value monitor: blend in extra damping as the
            // Jacobian approaches singularity.
            let threshold = 1e-4;
            let boost = if sigma_min < threshold {
                let t = 1.0 - sigma_min / threshold;
                (1e-3 * t).powi(2)
            } else {
                0.0
            };
            base * base + boost
        }
    };
    let ub = u.transpose() * &bw;
    let mut y = DVector::zeros(v_t.nrows());
    for i in 0..svd.singular_values.len().min(v_t.nrows()) {
        let s = svd.singular_values[i];
        if s > 0.0 || lambda2 > 0.0 {
            y[i] = s * ub[i] / (s * s + lambda2);
        }
    }
    Ok(v_t.transpose() * y)
}

/// One pass of the dynamical inverse-kinematics update: solve
/// `J nu = v_target + K r` for the system velocity and integrate the
/// configuration by `dt`. No inner iterations.
pub fn dynamical_ik_step(
    model: &FloatingBaseModel,
    state: &IkState,
    targets: &TargetSet,
    dt: f64,
    options: &IkOptions,
) -> Result<IkState, KinematicsError> {
    if dt <= 0.0 {
        return Err(KinematicsError::InvalidInput("dt must be positive".into()));
    }
    let poses = forward_kinematics(model, &state.config);
    let residual = targets.pose_residuals_with_poses(&poses);
    let mut j = DMatrix::zeros(6 * targets.len(), model.dof() + 6);
    for (k, target) in targets.targets().iter().enumerate() {
        j.rows_mut(6 * k, 6)
            .copy_from(&frame_jacobian_with_poses(model, &poses, target.link));
    }
    let b = targets.velocity_targets() + residual.component_mul(&state.gain);
    let nu = damped_solve(&j, &b, &targets.row_weights(), options.damping)?;
    let velocity = Velocity::from_vector(&nu);
    let mut config = state.config.integrated(&velocity, dt);
    if options.enforce_limits {
        config = config.clamped_to_limits(model);
    }
    let next_residual = targets.pose_residuals(model, &config);
    Ok(IkState {
        config,
        gain: state.gain.clone(),
        residual: next_residual,
    })
}

/// Result of the instantaneous (iterative) inverse-kinematics solve.
#[derive(Clone, Debug)]
pub struct IkSolution {
    pub config: Configuration,
    pub converged: bool,
    pub iterations: usize,
    pub residual_norm: f64,
}

/// Gauss-Newton minimization of the weighted pose residual with projected
/// joint limits. Returns the best iterate with a convergence flag; hitting
/// the iteration cap leaves the flag false.
pub fn instantaneous_ik(
    model: &FloatingBaseModel,
    targets: &TargetSet,
    q0: &Configuration,
    options: &IkOptions,
) -> Result<IkSolution, KinematicsError> {
    let weights = targets.row_weights();
    let mut config = q0.clone();
    if options.enforce_limits {
        config = config.clamped_to_limits(model);
    }
    let weighted_norm = |r: &DVector<f64>| -> f64 {
        r.iter()
            .zip(weights.iter())
            .map(|(ri, wi)| wi * ri * ri)
            .sum::<f64>()
            .sqrt()
    };
    let mut residual = targets.pose_residuals(model, &config);
    let mut best = IkSolution {
        config: config.clone(),
        converged: false,
        iterations: 0,
        residual_norm: weighted_norm(&residual),
    };
    for iteration in 0..options.max_iterations {
        if best.residual_norm < options.residual_tol {
            best.converged = true;
            best.iterations = iteration;
            return Ok(best);
        }
        let poses = forward_kinematics(model, &config);
        let mut j = DMatrix::zeros(6 * targets.len(), model.dof() + 6);
        for (k, target) in targets.targets().iter().enumerate() {
            j.rows_mut(6 * k, 6)
                .copy_from(&frame_jacobian_with_poses(model, &poses, target.link));
        }
        let step = damped_solve(&j, &residual, &weights, options.damping)?;
        // Backtracking keeps the iterate monotone in the residual norm.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let candidate_vel = Velocity::from_vector(&(&step * scale));
            let mut candidate = config.integrated(&candidate_vel, 1.0);
            if options.enforce_limits {
                candidate = candidate.clamped_to_limits(model);
            }
            let candidate_residual = targets.pose_residuals(model, &candidate);
            if weighted_norm(&candidate_residual) < best.residual_norm {
                config = candidate;
                residual = candidate_residual;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            // No descent direction left at this scale; report the best seen.
            best.iterations = iteration + 1;
            return Ok(best);
        }
        let norm = weighted_norm(&residual);
        if norm < best.residual_norm {
            best = IkSolution {
                config: config.clone(),
                converged: false,
                iterations: iteration + 1,
                residual_norm: norm,
            };
        }
    }
    best.converged = best.residual_norm < options.residual_tol;
    Ok(best)
}
