use std::collections::BTreeMap;

use super::{ModelError, Shape};
use crate::spatial::{Pose, Rotation, SpatialInertia, Vec3, Vec6};

#[derive(Clone, Debug)]
pub struct Link {
    pub name: String,
    pub shape: Option<Shape>,
    pub inertia: SpatialInertia,
}

#[derive(Clone, Debug, PartialEq)]
pub enum JointKind {
    /// One-dof rotation about a unit axis expressed in the child frame.
    Revolute { axis: Vec3 },
    Fixed,
}

#[derive(Clone, Debug)]
pub struct Joint {
    pub name: String,
    pub parent: usize,
    pub child: usize,
    /// Pose of the child frame in the parent frame at zero joint position.
    pub origin: Pose,
    pub kind: JointKind,
    /// Position limits (lower, upper) in radians, when enforced.
    pub limits: Option<(f64, f64)>,
}

impl Joint {
    /// Pose of the child frame in the parent frame at joint position `q`.
    pub fn child_pose_in_parent(&self, q: f64) -> Pose {
        match &self.kind {
            JointKind::Revolute { axis } => {
                self.origin * Pose::from_rotation(Rotation::from_axis_angle(axis, q))
            }
            JointKind::Fixed => self.origin,
        }
    }

    /// Motion subspace column in child coordinates (zero linear part for a
    /// revolute axis); `None` for fixed joints.
    pub fn motion_subspace(&self) -> Option<Vec6> {
        match &self.kind {
            JointKind::Revolute { axis } => {
                Some(Vec6::new(0.0, 0.0, 0.0, axis.x, axis.y, axis.z))
            }
            JointKind::Fixed => None,
        }
    }
}

/// A validated floating-base kinematic tree.
///
/// Links are numbered topologically (every link's index exceeds its unique
/// parent's) with the base at index 0. Joints are stored sorted by child
/// index, so iterating them in order visits parents before children.
#[derive(Clone, Debug)]
pub struct FloatingBaseModel {
    name: String,
    links: Vec<Link>,
    joints: Vec<Joint>,
    parent_joint: Vec<Option<usize>>,
    dof_index: Vec<Option<usize>>,
    n: usize,
}

impl FloatingBaseModel {
    pub fn new(name: String, links: Vec<Link>, joints: Vec<Joint>) -> Result<Self, ModelError> {
        if links.is_empty() {
            return Err(ModelError::Topology("model has no links".into()));
        }
        let mut names = BTreeMap::new();
        for (i, link) in links.iter().enumerate() {
            if names.insert(link.name.clone(), i).is_some() {
                return Err(ModelError::Topology(format!(
                    "duplicate link name '{}'",
                    link.name
                )));
            }
            if link.inertia.mass() < 0.0 {
                return Err(ModelError::InvalidInertia(link.name.clone()));
            }
            if link.inertia.mass() > 0.0 && !link.inertia.is_positive_definite() {
                return Err(ModelError::InvalidInertia(link.name.clone()));
            }
        }
        let mut joint_names = BTreeMap::new();
        let mut parent_joint: Vec<Option<usize>> = vec![None; links.len()];
        let mut joints = joints;
        joints.sort_by_key(|j| j.child);
        for (ji, joint) in joints.iter_mut().enumerate() {
            if joint_names.insert(joint.name.clone(), ji).is_some() {
                return Err(ModelError::Topology(format!(
                    "duplicate joint name '{}'",
                    joint.name
                )));
            }
            if joint.parent >= links.len() || joint.child >= links.len() {
                return Err(ModelError::Topology(format!(
                    "joint '{}' references a missing link",
                    joint.name
                )));
            }
            if joint.child == joint.parent {
                return Err(ModelError::Topology(format!(
                    "joint '{}' connects link '{}' to itself",
                    joint.name, links[joint.child].name
                )));
            }
            if joint.child < joint.parent {
                return Err(ModelError::Topology(format!(
                    "joint '{}' violates topological numbering (child {} below parent {})",
                    joint.name, joint.child, joint.parent
                )));
            }
            if joint.child == 0 {
                return Err(ModelError::Topology(format!(
                    "joint '{}' makes the base link a child",
                    joint.name
                )));
            }
            if parent_joint[joint.child].is_some() {
                return Err(ModelError::Topology(format!(
                    "link '{}' has more than one parent joint",
                    links[joint.child].name
                )));
            }
            if let JointKind::Revolute { axis } = &mut joint.kind {
                let norm = axis.norm();
                if norm < 1e-9 {
                    return Err(ModelError::Topology(format!(
                        "joint '{}' has a zero rotation axis",
                        joint.name
                    )));
                }
                *axis /= norm;
            }
            parent_joint[joint.child] = Some(ji);
        }
        for (li, pj) in parent_joint.iter().enumerate() {
            if li != 0 && pj.is_none() {
                return Err(ModelError::Topology(format!(
                    "link '{}' is not connected to the tree",
                    links[li].name
                )));
            }
        }
        let mut dof_index = Vec::with_capacity(joints.len());
        let mut n = 0usize;
        for joint in &joints {
            match joint.kind {
                JointKind::Revolute { .. } => {
                    dof_index.push(Some(n));
                    n += 1;
                }
                JointKind::Fixed => dof_index.push(None),
            }
        }
        Ok(Self {
            name,
            links,
            joints,
            parent_joint,
            dof_index,
            n,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of actuated degrees of freedom (excluding the floating base).
    pub fn dof(&self) -> usize {
        self.n
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn num_joints(&self) -> usize {
        self.joints.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn link(&self, index: usize) -> &Link {
        &self.links[index]
    }

    pub fn joint(&self, index: usize) -> &Joint {
        &self.joints[index]
    }

    pub fn link_index(&self, name: &str) -> Result<usize, ModelError> {
        self.links
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| ModelError::UnknownLink(name.to_string()))
    }

    pub fn joint_index(&self, name: &str) -> Option<usize> {
        self.joints.iter().position(|j| j.name == name)
    }

    /// Index of the parent joint of `link`, `None` for the base.
    pub fn parent_joint(&self, link: usize) -> Option<usize> {
        self.parent_joint[link]
    }

    /// Position of joint `joint`'s dof in the joint-position vector; `None`
    /// for fixed joints.
    pub fn dof_index(&self, joint: usize) -> Option<usize> {
        self.dof_index[joint]
    }

    pub fn total_mass(&self) -> f64 {
        self.links.iter().map(|l| l.inertia.mass()).sum()
    }

    /// Joint indices along the chain from the base to `link`, base side
    /// first.
    pub fn path_to_base(&self, link: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut current = link;
        while let Some(ji) = self.parent_joint[current] {
            path.push(ji);
            current = self.joints[ji].parent;
        }
        path.reverse();
        path
    }

    /// Child joints of `link`.
    pub fn child_joints(&self, link: usize) -> Vec<usize> {
        self.joints
            .iter()
            .enumerate()
            .filter(|(_, j)| j.parent == link)
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{inertia_from_shape, Shape};

    fn ball(name: &str, mass: f64) -> Link {
        Link {
            name: name.into(),
            shape: Some(Shape::Sphere { radius: 0.1 }),
            inertia: inertia_from_shape(&Shape::Sphere { radius: 0.1 }, mass),
        }
    }

    #[test]
    fn rejects_self_loop() {
        let links = vec![ball("a", 1.0), ball("b", 1.0)];
        let joints = vec![Joint {
            name: "j".into(),
            parent: 1,
            child: 1,
            origin: Pose::identity(),
            kind: JointKind::Revolute { axis: Vec3::z() },
            limits: None,
        }];
        assert!(matches!(
            FloatingBaseModel::new("m".into(), links, joints),
            Err(ModelError::Topology(_))
        ));
    }

    #[test]
    fn rejects_double_parent() {
        let links = vec![ball("a", 1.0), ball("b", 1.0), ball("c", 1.0)];
        let mk = |name: &str, parent, child| Joint {
            name: name.into(),
            parent,
            child,
            origin: Pose::identity(),
            kind: JointKind::Revolute { axis: Vec3::z() },
            limits: None,
        };
        let joints = vec![mk("j1", 0, 2), mk("j2", 1, 2), mk("j3", 0, 1)];
        assert!(matches!(
            FloatingBaseModel::new("m".into(), links, joints),
            Err(ModelError::Topology(_))
        ));
    }

    #[test]
    fn counts_dofs_and_paths() {
        let links = vec![ball("a", 1.0), ball("b", 1.0), ball("c", 1.0)];
        let mk = |name: &str, parent, child, kind| Joint {
            name: name.into(),
            parent,
            child,
            origin: Pose::from_translation(Vec3::new(0.0, 0.0, 1.0)),
            kind,
            limits: None,
        };
        let model = FloatingBaseModel::new(
            "m".into(),
            links,
            vec![
                mk("j1", 0, 1, JointKind::Revolute { axis: Vec3::z() }),
                mk("j2", 1, 2, JointKind::Fixed),
            ],
        )
        .unwrap();
        assert_eq!(model.dof(), 1);
        assert_eq!(model.path_to_base(2), vec![0, 1]);
        assert_eq!(model.dof_index(0), Some(0));
        assert_eq!(model.dof_index(1), None);
    }
}
