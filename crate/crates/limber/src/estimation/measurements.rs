use nalgebra::{DMatrix, DVector, Vector6};

use super::variables::VariableLayout;
use super::EstimationError;
use crate::dynamics::{center_of_mass, com_acceleration_from, Acceleration};
use crate::kinematics::{forward_kinematics, Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{adjoint_force, ForceVector, Vec3};

/// Sensor kinds supported by the measurement equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sensor {
    /// 3 rows: linear part of a link's proper acceleration (accelerometer).
    LinkAccelerometer { link: usize },
    /// 6 rows: full proper acceleration of a link (IMU package).
    LinkImu { link: usize },
    /// 6 rows: identity selector on a link's external wrench.
    LinkWrench { link: usize },
    /// 1 row: one joint dof's acceleration.
    JointAcceleration { dof: usize },
    /// 6 rows: whole-body momentum-rate pseudo-sensor, summing all external
    /// wrenches transported to the base frame.
    MomentumRate,
}

/// A sensor with its per-channel measurement covariance.
#[derive(Clone, Copy, Debug)]
pub struct SensorSpec {
    pub sensor: Sensor,
    pub covariance: f64,
}

impl SensorSpec {
    pub fn new(sensor: Sensor, covariance: f64) -> Self {
        assert!(covariance > 0.0, "covariance must be positive");
        Self { sensor, covariance }
    }

    pub fn rows(&self) -> usize {
        match self.sensor {
            Sensor::LinkAccelerometer { .. } => 3,
            Sensor::LinkImu { .. } | Sensor::LinkWrench { .. } | Sensor::MomentumRate => 6,
            Sensor::JointAcceleration { .. } => 1,
        }
    }
}

/// Stacked linear measurement model `Y d + b_Y = y` with a diagonal
/// covariance.
#[derive(Clone, Debug)]
pub struct MeasurementModel {
    pub y_matrix: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub sigma_diag: DVector<f64>,
    pub sensors: Vec<SensorSpec>,
}

impl MeasurementModel {
    pub fn rows(&self) -> usize {
        self.y_matrix.nrows()
    }

    /// Predicted measurements for a candidate `d`.
    pub fn predict(&self, d: &DVector<f64>) -> DVector<f64> {
        &self.y_matrix * d + &self.bias
    }

    /// Row range occupied by sensor `k`.
    pub fn sensor_rows(&self, k: usize) -> std::ops::Range<usize> {
        let start: usize = self.sensors[..k].iter().map(|s| s.rows()).sum();
        start..start + self.sensors[k].rows()
    }
}

pub fn build_measurement_model(
    model: &FloatingBaseModel,
    q: &Configuration,
    sensors: &[SensorSpec],
) -> Result<MeasurementModel, EstimationError> {
    let layout = VariableLayout::of(model);
    let rows: usize = sensors.iter().map(|s| s.rows()).sum();
    let mut y = DMatrix::zeros(rows, layout.len());
    let bias = DVector::zeros(rows);
    let mut sigma = DVector::zeros(rows);
    let poses = forward_kinematics(model, q);
    let base_inv = q.base_pose.inverse();

    let mut row = 0usize;
    for spec in sensors {
        let count = spec.rows();
        sigma.rows_mut(row, count).fill(spec.covariance);
        match spec.sensor {
            Sensor::LinkAccelerometer { link } => {
                check_link(model, link)?;
                for r in 0..3 {
                    y[(row + r, layout.link_acceleration(link) + r)] = 1.0;
                }
            }
            Sensor::LinkImu { link } => {
                check_link(model, link)?;
                for r in 0..6 {
                    y[(row + r, layout.link_acceleration(link) + r)] = 1.0;
                }
            }
            Sensor::LinkWrench { link } => {
                check_link(model, link)?;
                for r in 0..6 {
                    y[(row + r, layout.link_wrench(link) + r)] = 1.0;
                }
            }
            Sensor::JointAcceleration { dof } => {
                if dof >= layout.dofs {
                    return Err(EstimationError::UnknownFrame(format!("dof {dof}")));
                }
                y[(row, layout.joint_acceleration(dof))] = 1.0;
            }
            Sensor::MomentumRate => {
                for i in 0..layout.links {
                    let rel_to_base = (base_inv * poses[i]).inverse();
                    let xf = adjoint_force(&rel_to_base);
                    y.view_mut((row, layout.link_wrench(i)), (6, 6))
                        .copy_from(&xf);
                }
            }
        }
        row += count;
    }
    Ok(MeasurementModel {
        y_matrix: y,
        bias,
        sigma_diag: sigma,
        sensors: sensors.to_vec(),
    })
}

fn check_link(model: &FloatingBaseModel, link: usize) -> Result<(), EstimationError> {
    if link >= model.num_links() {
        return Err(EstimationError::UnknownFrame(format!("link {link}")));
    }
    Ok(())
}

/// Value fed to the momentum-rate pseudo-sensor: the whole-body momentum
/// rate with the angular part zeroed, minus the gravity wrench, transported
/// from the centroidal frame into the base frame.
///
/// The linear part uses the true CoM acceleration from the motion state; the
/// angular rate is deliberately dropped, mirroring the estimator's modeling
/// choice rather than the dynamics module's exact rate.
pub fn momentum_rate_measurement(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    acceleration: &Acceleration,
    gravity: &Vec3,
) -> Vector6<f64> {
    let mass = model.total_mass();
    let com_acc = com_acceleration_from(model, q, velocity, acceleration);
    let ldot_zeroed = ForceVector::new(mass * com_acc, Vec3::zeros());
    let gravity_wrench = ForceVector::new(gravity * mass, Vec3::zeros());
    let in_centroidal = ldot_zeroed - gravity_wrench;
    // Transport from the centroidal frame (world axes at the CoM) into the
    // base frame.
    let com = center_of_mass(model, q);
    let r = com - q.base_pose.position;
    let at_base_world = ForceVector::new(
        in_centroidal.force,
        in_centroidal.moment + r.cross(&in_centroidal.force),
    );
    let rot = q.base_pose.rotation;
    ForceVector::new(
        rot.rotate_back(&at_base_world.force),
        rot.rotate_back(&at_base_world.moment),
    )
    .to_vector()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::models::hanging_chain;

    #[test]
    fn selector_shapes() {
        let model = hanging_chain(2, 1.0, 0.5);
        let q = Configuration::neutral(&model);
        let sensors = vec![
            SensorSpec::new(Sensor::JointAcceleration { dof: 0 }, 1e-4),
            SensorSpec::new(Sensor::LinkAccelerometer { link: 1 }, 1e-4),
            SensorSpec::new(Sensor::LinkWrench { link: 2 }, 1e-6),
        ];
        let mm = build_measurement_model(&model, &q, &sensors).unwrap();
        assert_eq!(mm.rows(), 1 + 3 + 6);
        // Joint-acceleration row is a single selector.
        assert_eq!(mm.y_matrix.row(0).iter().filter(|v| **v != 0.0).count(), 1);
        // Wrench rows are identity selectors on the f^x block.
        let layout = VariableLayout::of(&model);
        for r in 0..6 {
            assert_eq!(mm.y_matrix[(4 + r, layout.link_wrench(2) + r)], 1.0);
        }
    }

    #[test]
    fn task1_stack_has_expected_shape() {
        // Wrench selectors on every link plus the momentum pseudo-sensor
        // give 6 N_B + 6 rows.
        let model = hanging_chain(2, 1.0, 0.5);
        let q = Configuration::neutral(&model);
        let mut sensors: Vec<SensorSpec> = (0..model.num_links())
            .map(|link| SensorSpec::new(Sensor::LinkWrench { link }, 1e-6))
            .collect();
        sensors.push(SensorSpec::new(Sensor::MomentumRate, 1e-6));
        let mm = build_measurement_model(&model, &q, &sensors).unwrap();
        assert_eq!(mm.rows(), 6 * model.num_links() + 6);
    }

    #[test]
    fn unknown_frame_is_rejected() {
        let model = hanging_chain(1, 1.0, 0.5);
        let q = Configuration::neutral(&model);
        let bad = vec![SensorSpec::new(Sensor::LinkWrench { link: 99 }, 1.0)];
        assert!(matches!(
            build_measurement_model(&model, &q, &bad),
            Err(EstimationError::UnknownFrame(_))
        ));
    }
}
