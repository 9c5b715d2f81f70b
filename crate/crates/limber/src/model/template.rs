use std::collections::BTreeMap;

use super::{inertia_from_shape, FloatingBaseModel, Joint, JointKind, Link, ModelError, Shape};
use crate::spatial::{Pose, SpatialInertia, Vec3};

/// Anthropometric segment table: name, default shape, mass fraction of the
/// total body mass.
pub const HUMAN_LINKS: [(&str, Shape, f64); 23] = [
    ("Pelvis", Shape::Box { width: 0.26, height: 0.12, depth: 0.18 }, 0.08),
    ("L5", Shape::Box { width: 0.24, height: 0.10, depth: 0.16 }, 0.102),
    ("L3", Shape::Box { width: 0.24, height: 0.10, depth: 0.16 }, 0.102),
    ("T12", Shape::Box { width: 0.24, height: 0.10, depth: 0.16 }, 0.102),
    ("T8", Shape::Box { width: 0.26, height: 0.14, depth: 0.18 }, 0.04),
    ("Neck", Shape::Cylinder { radius: 0.05, height: 0.10 }, 0.012),
    ("Head", Shape::Sphere { radius: 0.09 }, 0.036),
    ("RightShoulder", Shape::Cylinder { radius: 0.04, height: 0.16 }, 0.031),
    ("RightUpperArm", Shape::Cylinder { radius: 0.04, height: 0.28 }, 0.030),
    ("RightForeArm", Shape::Cylinder { radius: 0.035, height: 0.26 }, 0.020),
    ("RightHand", Shape::Box { width: 0.08, height: 0.16, depth: 0.03 }, 0.006),
    ("LeftShoulder", Shape::Cylinder { radius: 0.04, height: 0.16 }, 0.031),
    ("LeftUpperArm", Shape::Cylinder { radius: 0.04, height: 0.28 }, 0.030),
    ("LeftForeArm", Shape::Cylinder { radius: 0.035, height: 0.26 }, 0.020),
    ("LeftHand", Shape::Box { width: 0.08, height: 0.16, depth: 0.03 }, 0.006),
    ("RightUpperLeg", Shape::Cylinder { radius: 0.07, height: 0.40 }, 0.125),
    ("RightLowerLeg", Shape::Cylinder { radius: 0.05, height: 0.40 }, 0.0365),
    ("RightFoot", Shape::Box { width: 0.20, height: 0.07, depth: 0.10 }, 0.013),
    // The toe fractions are asymmetric as printed in the source table; the
    // template reproduces them verbatim and flags the asymmetry.
    ("RightToe", Shape::Box { width: 0.06, height: 0.03, depth: 0.08 }, 0.015),
    ("LeftUpperLeg", Shape::Cylinder { radius: 0.07, height: 0.40 }, 0.125),
    ("LeftLowerLeg", Shape::Cylinder { radius: 0.05, height: 0.40 }, 0.0365),
    ("LeftFoot", Shape::Box { width: 0.20, height: 0.07, depth: 0.10 }, 0.013),
    ("LeftToe", Shape::Box { width: 0.06, height: 0.03, depth: 0.08 }, 0.0015),
];

/// Joint table: name, parent link, child link, dofs in the full model,
/// dofs in the reduced model, and the joint origin in the parent frame.
pub const HUMAN_JOINTS: [(&str, &str, &str, usize, usize, [f64; 3]); 22] = [
    ("jL5S1", "Pelvis", "L5", 3, 2, [0.0, 0.0, 0.12]),
    ("jL4L3", "L5", "L3", 3, 2, [0.0, 0.0, 0.10]),
    ("jL1T12", "L3", "T12", 3, 2, [0.0, 0.0, 0.10]),
    ("jT9T8", "T12", "T8", 3, 3, [0.0, 0.0, 0.12]),
    ("jT1C7", "T8", "Neck", 3, 3, [0.0, 0.0, 0.14]),
    ("jC1Head", "Neck", "Head", 3, 2, [0.0, 0.0, 0.12]),
    ("jRightHip", "Pelvis", "RightUpperLeg", 3, 3, [0.0, -0.09, -0.06]),
    ("jRightKnee", "RightUpperLeg", "RightLowerLeg", 3, 2, [0.0, 0.0, -0.40]),
    ("jRightAnkle", "RightLowerLeg", "RightFoot", 3, 3, [0.0, 0.0, -0.40]),
    ("jRightBallFoot", "RightFoot", "RightToe", 3, 1, [0.14, 0.0, -0.05]),
    ("jLeftHip", "Pelvis", "LeftUpperLeg", 3, 3, [0.0, 0.09, -0.06]),
    ("jLeftKnee", "LeftUpperLeg", "LeftLowerLeg", 3, 2, [0.0, 0.0, -0.40]),
    ("jLeftAnkle", "LeftLowerLeg", "LeftFoot", 3, 3, [0.0, 0.0, -0.40]),
    ("jLeftBallFoot", "LeftFoot", "LeftToe", 3, 1, [0.14, 0.0, -0.05]),
    ("jRightC7Shoulder", "T8", "RightShoulder", 3, 1, [0.0, -0.10, 0.10]),
    ("jRightShoulder", "RightShoulder", "RightUpperArm", 3, 3, [0.0, -0.16, 0.0]),
    ("jRightElbow", "RightUpperArm", "RightForeArm", 3, 2, [0.0, 0.0, -0.28]),
    ("jRightWrist", "RightForeArm", "RightHand", 3, 2, [0.0, 0.0, -0.26]),
    ("jLeftC7Shoulder", "T8", "LeftShoulder", 3, 1, [0.0, 0.10, 0.10]),
    ("jLeftShoulder", "LeftShoulder", "LeftUpperArm", 3, 3, [0.0, 0.16, 0.0]),
    ("jLeftElbow", "LeftUpperArm", "LeftForeArm", 3, 2, [0.0, 0.0, -0.28]),
    ("jLeftWrist", "LeftForeArm", "LeftHand", 3, 2, [0.0, 0.0, -0.26]),
];

const SUB_AXIS_NAMES: [(&str, [f64; 3]); 3] = [
    ("x", [1.0, 0.0, 0.0]),
    ("y", [0.0, 1.0, 0.0]),
    ("z", [0.0, 0.0, 1.0]),
];

/// Per-segment dimension overrides for the human template.
#[derive(Clone, Debug, Default)]
pub struct TemplateDims {
    overrides: BTreeMap<String, Shape>,
}

impl TemplateDims {
    pub fn set(&mut self, link: &str, shape: Shape) {
        self.overrides.insert(link.to_string(), shape);
    }

    fn shape_for(&self, link: &str, default: Shape) -> Shape {
        self.overrides.get(link).copied().unwrap_or(default)
    }
}

/// Construction report emitted with the template.
#[derive(Clone, Debug)]
pub struct TemplateReport {
    /// Sum of the table's mass fractions (does not equal 1 as printed).
    pub mass_fraction_sum: f64,
    /// `mass_fraction_sum - 1`, reported rather than renormalized away.
    pub mass_fraction_residual: f64,
    /// The printed toe fractions differ between sides.
    pub toe_fraction_asymmetry: bool,
    pub dof: usize,
}

/// Builds the 23-link anthropometric template.
///
/// Multi-dof joints are decomposed into chains of single-dof revolute joints
/// (axes x, y, z in order) connected by zero-length massless links, so the
/// per-joint motion subspace stays a single column. `reduced` selects the
/// reduced dof counts (48 instead of 66).
pub fn build_human_template(
    total_mass: f64,
    dims: &TemplateDims,
    reduced: bool,
) -> Result<(FloatingBaseModel, TemplateReport), ModelError> {
    if total_mass <= 0.0 {
        return Err(ModelError::InvalidDimension(format!(
            "total mass must be positive, got {total_mass}"
        )));
    }
    let mut links = Vec::new();
    let mut index = BTreeMap::new();
    for (name, default_shape, fraction) in HUMAN_LINKS {
        let shape = dims.shape_for(name, default_shape);
        if !shape.dims_positive() {
            return Err(ModelError::InvalidDimension(format!(
                "link '{name}' has non-positive dimensions"
            )));
        }
        let mass = fraction * total_mass;
        index.insert(name.to_string(), links.len());
        links.push(Link {
            name: name.to_string(),
            shape: Some(shape),
            inertia: inertia_from_shape(&shape, mass),
        });
    }

    let mut joints = Vec::new();
    for (name, parent, child, full_dofs, reduced_dofs, xyz) in HUMAN_JOINTS {
        let dofs = if reduced { reduced_dofs } else { full_dofs };
        let parent_idx = index[parent];
        let child_idx = index[child];
        let origin = Pose::from_translation(Vec3::new(xyz[0], xyz[1], xyz[2]));
        let mut upstream = parent_idx;
        let mut upstream_origin = origin;
        for (k, (axis_name, axis)) in SUB_AXIS_NAMES.iter().take(dofs).enumerate() {
            let last = k == dofs - 1;
            let child_of_sub = if last {
                child_idx
            } else {
                let dummy_name = format!("{name}_link_{axis_name}");
                index.insert(dummy_name.clone(), links.len());
                links.push(Link {
                    name: dummy_name,
                    shape: None,
                    inertia: SpatialInertia::zero(),
                });
                links.len() - 1
            };
            joints.push(Joint {
                name: if dofs == 1 {
                    name.to_string()
                } else {
                    format!("{name}_{axis_name}")
                },
                parent: upstream,
                child: child_of_sub,
                origin: upstream_origin,
                kind: JointKind::Revolute {
                    axis: Vec3::new(axis[0], axis[1], axis[2]),
                },
                limits: Some((-std::f64::consts::PI, std::f64::consts::PI)),
            });
            upstream = child_of_sub;
            upstream_origin = Pose::identity();
        }
    }

    // The intermediate links were appended after their composite child in
    // some cases; re-number topologically before constructing the model.
    let model = reorder_topologically("human".to_string(), links, joints)?;

    let fraction_sum: f64 = HUMAN_LINKS.iter().map(|(_, _, f)| f).sum();
    let report = TemplateReport {
        mass_fraction_sum: fraction_sum,
        mass_fraction_residual: fraction_sum - 1.0,
        toe_fraction_asymmetry: true,
        dof: model.dof(),
    };
    Ok((model, report))
}

/// Stable topological re-numbering used by the template builder and the
/// model-file parser: link order is preserved where possible, parents always
/// come first.
pub(super) fn reorder_topologically(
    name: String,
    links: Vec<Link>,
    joints: Vec<Joint>,
) -> Result<FloatingBaseModel, ModelError> {
    let count = links.len();
    let mut parent_of: Vec<Option<usize>> = vec![None; count];
    for joint in &joints {
        if joint.parent >= count || joint.child >= count {
            return Err(ModelError::Topology(format!(
                "joint '{}' references a missing link",
                joint.name
            )));
        }
        if parent_of[joint.child].replace(joint.parent).is_some() {
            return Err(ModelError::Topology(format!(
                "link '{}' has more than one parent joint",
                links[joint.child].name
            )));
        }
    }
    let roots: Vec<usize> = (0..count).filter(|&i| parent_of[i].is_none()).collect();
    match roots.len() {
        0 => return Err(ModelError::Topology("kinematic loop detected".into())),
        1 => {}
        _ => {
            return Err(ModelError::Topology(format!(
                "multiple root links: {}",
                roots
                    .iter()
                    .map(|&i| links[i].name.clone())
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
    }
    // Stable Kahn ordering over the original indices.
    let mut order = Vec::with_capacity(count);
    let mut placed = vec![false; count];
    let mut remaining = count;
    while remaining > 0 {
        let before = order.len();
        for i in 0..count {
            if placed[i] {
                continue;
            }
            let ready = match parent_of[i] {
                None => true,
                Some(p) => placed[p],
            };
            if ready {
                placed[i] = true;
                order.push(i);
                remaining -= 1;
            }
        }
        if order.len() == before {
            return Err(ModelError::Topology("kinematic loop detected".into()));
        }
    }
    let mut new_index = vec![0usize; count];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let links: Vec<Link> = order.iter().map(|&old| links[old].clone()).collect();
    let joints: Vec<Joint> = joints
        .into_iter()
        .map(|mut j| {
            j.parent = new_index[j.parent];
            j.child = new_index[j.child];
            j
        })
        .collect();
    FloatingBaseModel::new(name, links, joints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mass_fractions_match_table() {
        let total = 60.0;
        let (model, report) = build_human_template(total, &TemplateDims::default(), false).unwrap();
        let pelvis = model.link(model.link_index("Pelvis").unwrap());
        assert_relative_eq!(pelvis.inertia.mass(), 0.08 * total, epsilon = 1e-12);
        let rul = model.link(model.link_index("RightUpperLeg").unwrap());
        assert_relative_eq!(rul.inertia.mass(), 0.125 * total, epsilon = 1e-12);
        // The printed fractions do not sum to one; the residual is reported.
        assert_relative_eq!(report.mass_fraction_sum, 1.0135, epsilon = 1e-12);
        assert!(report.toe_fraction_asymmetry);
        assert_relative_eq!(
            model.total_mass(),
            report.mass_fraction_sum * total,
            epsilon = 1e-9
        );
    }

    #[test]
    fn full_template_has_66_dofs() {
        let (model, report) = build_human_template(72.0, &TemplateDims::default(), false).unwrap();
        assert_eq!(model.dof(), 66);
        assert_eq!(report.dof, 66);
        // 23 named segments plus two massless links per 3-dof joint.
        assert_eq!(
            model.links().iter().filter(|l| l.shape.is_some()).count(),
            23
        );
    }

    #[test]
    fn reduced_template_has_48_dofs_and_two_dof_elbow() {
        let (model, _) = build_human_template(72.0, &TemplateDims::default(), true).unwrap();
        assert_eq!(model.dof(), 48);
        let elbow_subjoints = model
            .joints()
            .iter()
            .filter(|j| j.name.starts_with("jLeftElbow"))
            .count();
        assert_eq!(elbow_subjoints, 2);
    }

    #[test]
    fn motion_subspace_columns_are_unit_with_zero_linear_part() {
        let (model, _) = build_human_template(60.0, &TemplateDims::default(), false).unwrap();
        for joint in model.joints() {
            let s = joint.motion_subspace().unwrap();
            assert_relative_eq!(s.fixed_rows::<3>(0).norm(), 0.0, epsilon = 1e-15);
            assert_relative_eq!(s.fixed_rows::<3>(3).norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_human_template(0.0, &TemplateDims::default(), false).is_err());
        let mut dims = TemplateDims::default();
        dims.set("Head", Shape::Sphere { radius: -0.1 });
        assert!(build_human_template(70.0, &dims, false).is_err());
    }
}
