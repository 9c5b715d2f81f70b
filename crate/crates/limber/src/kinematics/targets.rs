use nalgebra::DVector;

use super::{forward_kinematics, Configuration, KinematicsError};
use crate::model::FloatingBaseModel;
use crate::spatial::{rotation_distance, Mat3, MotionVector, Pose, Rotation, Vec3};

/// One tracking target: desired pose and 6D velocity of a link.
#[derive(Clone, Debug)]
pub struct Target {
    pub link: usize,
    pub pose: Pose,
    pub velocity: MotionVector,
    pub weight_pos: f64,
    pub weight_ori: f64,
}

/// A set of link targets, resolved against a model.
#[derive(Clone, Debug, Default)]
pub struct TargetSet {
    targets: Vec<Target>,
}

impl TargetSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, target: Target) {
        self.targets.push(target);
    }

    pub fn with_pose(
        mut self,
        model: &FloatingBaseModel,
        link: &str,
        pose: Pose,
    ) -> Result<Self, KinematicsError> {
        let link = model
            .link_index(link)
            .map_err(|_| KinematicsError::UnknownFrame(link.to_string()))?;
        self.targets.push(Target {
            link,
            pose,
            velocity: MotionVector::zero(),
            weight_pos: 1.0,
            weight_ori: 1.0,
        });
        Ok(self)
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Stacked residual: per target the position difference `p_d - p`
    /// followed by the orientation distance carrying the actual rotation
    /// onto the desired one. Zero iff every target is met.
    pub fn pose_residuals(&self, model: &FloatingBaseModel, q: &Configuration) -> DVector<f64> {
        let poses = forward_kinematics(model, q);
        self.pose_residuals_with_poses(&poses)
    }

    pub(crate) fn pose_residuals_with_poses(&self, poses: &[Pose]) -> DVector<f64> {
        let mut r = DVector::zeros(6 * self.targets.len());
        for (k, target) in self.targets.iter().enumerate() {
            let actual = &poses[target.link];
            r.fixed_rows_mut::<3>(6 * k)
                .copy_from(&(target.pose.position - actual.position));
            r.fixed_rows_mut::<3>(6 * k + 3)
                .copy_from(&rotation_distance(&actual.rotation, &target.pose.rotation));
        }
        r
    }

    /// Stacked desired velocities, matching the residual layout.
    pub fn velocity_targets(&self) -> DVector<f64> {
        let mut v = DVector::zeros(6 * self.targets.len());
        for (k, target) in self.targets.iter().enumerate() {
            v.fixed_rows_mut::<3>(6 * k).copy_from(&target.velocity.linear);
            v.fixed_rows_mut::<3>(6 * k + 3)
                .copy_from(&target.velocity.angular);
        }
        v
    }

    /// Per-row weights (position weight for the first three rows of each
    /// target, orientation weight for the last three).
    pub fn row_weights(&self) -> DVector<f64> {
        let mut w = DVector::zeros(6 * self.targets.len());
        for (k, target) in self.targets.iter().enumerate() {
            w.rows_mut(6 * k, 3).fill(target.weight_pos);
            w.rows_mut(6 * k + 3, 3).fill(target.weight_ori);
        }
        w
    }
}

/// Parses a target stream: one CSV row per frame and link with the columns
/// `link, px, py, pz, r00..r22 (row-major), vx, vy, vz, wx, wy, wz`.
///
/// A leading header row is skipped when present. Rows are grouped into
/// frames: a frame ends when a link name repeats.
pub fn parse_target_csv(
    model: &FloatingBaseModel,
    text: &str,
) -> Result<Vec<TargetSet>, KinematicsError> {
    let mut frames: Vec<TargetSet> = Vec::new();
    let mut current = TargetSet::new();
    let mut seen: Vec<usize> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 19 {
            if lineno == 0 {
                continue; // header row
            }
            return Err(KinematicsError::InvalidInput(format!(
                "target row {} has {} fields, expected 19",
                lineno + 1,
                fields.len()
            )));
        }
        if lineno == 0 && fields[1].parse::<f64>().is_err() {
            continue; // header row
        }
        let link = model
            .link_index(fields[0])
            .map_err(|_| KinematicsError::UnknownFrame(fields[0].to_string()))?;
        let nums: Vec<f64> = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| {
                KinematicsError::InvalidInput(format!("bad number on target row {}", lineno + 1))
            })?;
        let position = Vec3::new(nums[0], nums[1], nums[2]);
        let rot = Mat3::new(
            nums[3], nums[4], nums[5], nums[6], nums[7], nums[8], nums[9], nums[10], nums[11],
        );
        let rotation = Rotation::from_matrix(rot)
            .map_err(|e| KinematicsError::InvalidInput(format!("row {}: {e}", lineno + 1)))?;
        let velocity = MotionVector::new(
            Vec3::new(nums[12], nums[13], nums[14]),
            Vec3::new(nums[15], nums[16], nums[17]),
        );
        if seen.contains(&link) {
            frames.push(current);
            current = TargetSet::new();
            seen.clear();
        }
        seen.push(link);
        current.push(Target {
            link,
            pose: Pose::new(rotation, position),
            velocity,
            weight_pos: 1.0,
            weight_ori: 1.0,
        });
    }
    if !current.is_empty() {
        frames.push(current);
    }
    Ok(frames)
}
