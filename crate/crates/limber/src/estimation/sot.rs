use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Vector6};

use super::constraints::build_constraint_model;
use super::map::{map_estimate, GaussianPrior, MapResult};
use super::measurements::{build_measurement_model, MeasurementModel, Sensor, SensorSpec};
use super::variables::VariableLayout;
use super::EstimationError;
use crate::kinematics::{Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::ForceVector;

/// Covariance schedule for the two-task estimator.
///
/// Feet and the momentum pseudo-measurement are trusted hard, hand wrench
/// "measurements" (zeros) barely at all, so the momentum balance is free to
/// move the hand estimates.
#[derive(Clone, Copy, Debug)]
pub struct SotCovariances {
    pub feet_wrench: f64,
    pub hand_wrench: f64,
    pub other_wrench: f64,
    pub momentum: f64,
    /// Task-1 prior covariance on feet (and other) wrench variables.
    pub prior_feet: f64,
    /// Task-1 prior covariance on hand wrench variables.
    pub prior_hands: f64,
    /// Covariance of the task-1 estimates when re-injected as task-2
    /// measurements.
    pub task2_wrench: f64,
    pub model: f64,
    pub prior: f64,
}

impl Default for SotCovariances {
    fn default() -> Self {
        Self {
            feet_wrench: 1e-6,
            hand_wrench: 1e2,
            other_wrench: 1e-6,
            momentum: 1e-6,
            prior_feet: 1e-2,
            prior_hands: 1e6,
            task2_wrench: 1e-6,
            model: 1e-4,
            prior: 1e4,
        }
    }
}

/// Inputs for one stack-of-tasks estimation frame.
#[derive(Clone, Debug)]
pub struct SotProblem {
    pub feet: Vec<usize>,
    pub hands: Vec<usize>,
    /// Measured external wrenches in link frames (typically the feet); all
    /// unmentioned links measure zero.
    pub measured_wrenches: BTreeMap<usize, ForceVector>,
    /// Momentum-rate pseudo-measurement in the base frame, angular part
    /// already zeroed by the caller.
    pub momentum_rate: Vector6<f64>,
    /// Additional task-2 sensors (IMUs, joint accelerations) and their
    /// measured values.
    pub extra_sensors: Vec<SensorSpec>,
    pub extra_measurements: DVector<f64>,
    pub covariances: SotCovariances,
}

/// Output of the two-task estimator.
#[derive(Clone, Debug)]
pub struct SotResult {
    /// Task-1 external-wrench estimates per link (link frames).
    pub task1_wrenches: Vec<ForceVector>,
    /// Full posterior from task 2.
    pub posterior: MapResult,
}

/// Two-task sensorless external-force estimation.
///
/// Task 1 estimates only the stacked external wrenches from the wrench
/// measurements plus the momentum-rate row. Task 2 re-runs the full MAP
/// problem with the task-1 estimates substituted as trusted wrench
/// measurements.
pub fn stack_of_tasks_estimate(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    problem: &SotProblem,
) -> Result<SotResult, EstimationError> {
    let layout = VariableLayout::of(model);
    let nb = layout.links;
    let cov = &problem.covariances;

    // ---- Task 1: wrench-only subproblem.
    // The full-model measurement machinery assembles the rows; the wrench
    // variables are the only columns they touch, so the task-1 system is the
    // same stack restricted to those columns.
    let mut sensors = Vec::with_capacity(nb + 1);
    let mut y1 = DVector::zeros(6 * nb + 6);
    for link in 0..nb {
        let sigma = if problem.feet.contains(&link) {
            cov.feet_wrench
        } else if problem.hands.contains(&link) {
            cov.hand_wrench
        } else {
            cov.other_wrench
        };
        sensors.push(SensorSpec::new(Sensor::LinkWrench { link }, sigma));
        if let Some(w) = problem.measured_wrenches.get(&link) {
            y1.fixed_rows_mut::<6>(6 * link).copy_from(&w.to_vector());
        }
    }
    sensors.push(SensorSpec::new(Sensor::MomentumRate, cov.momentum));
    y1.fixed_rows_mut::<6>(6 * nb).copy_from(&problem.momentum_rate);
    let full_rows = build_measurement_model(model, q, &sensors)?;

    // Restrict columns to the wrench blocks.
    let mut y_matrix = DMatrix::zeros(full_rows.rows(), 6 * nb);
    for link in 0..nb {
        y_matrix
            .view_mut((0, 6 * link), (full_rows.rows(), 6))
            .copy_from(&full_rows.y_matrix.view((0, layout.link_wrench(link)), (full_rows.rows(), 6)));
    }
    let task1_measurements = MeasurementModel {
        y_matrix,
        bias: DVector::zeros(full_rows.rows()),
        sigma_diag: full_rows.sigma_diag.clone(),
        sensors,
    };
    let mut prior1 = GaussianPrior::weak(6 * nb, cov.prior_feet);
    for link in 0..nb {
        if problem.hands.contains(&link) {
            prior1
                .sigma_diag
                .rows_mut(6 * link, 6)
                .fill(cov.prior_hands);
        }
    }
    let task1 = map_estimate(None, cov.model, &task1_measurements, &prior1, &y1)?;
    let task1_wrenches: Vec<ForceVector> = (0..nb)
        .map(|link| {
            ForceVector::from_vector(&Vector6::from_iterator(
                task1.mean.rows(6 * link, 6).iter().copied(),
            ))
        })
        .collect();

    // ---- Task 2: full problem with the task-1 estimates as trusted wrench
    // measurements.
    let constraints = build_constraint_model(model, q, velocity);
    let mut sensors2: Vec<SensorSpec> = (0..nb)
        .map(|link| SensorSpec::new(Sensor::LinkWrench { link }, cov.task2_wrench))
        .collect();
    sensors2.extend_from_slice(&problem.extra_sensors);
    let measurements2 = build_measurement_model(model, q, &sensors2)?;
    let mut y2 = DVector::zeros(measurements2.rows());
    for link in 0..nb {
        y2.fixed_rows_mut::<6>(6 * link)
            .copy_from(&task1_wrenches[link].to_vector());
    }
    y2.rows_mut(6 * nb, problem.extra_measurements.len())
        .copy_from(&problem.extra_measurements);
    let prior2 = GaussianPrior::weak(layout.len(), cov.prior);
    let mut posterior = map_estimate(Some(&constraints), cov.model, &measurements2, &prior2, &y2)?;
    posterior.layout = Some(layout);

    Ok(SotResult {
        task1_wrenches,
        posterior,
    })
}
