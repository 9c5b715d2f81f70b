//! Built-in test models used by the scenarios and the test suites.

use nalgebra::DVector;
use rand::Rng;

use crate::control::{AgentState, CoupledSystem, MutualContact, MutualKind};
use crate::dynamics::{ContactPoint, ContactSet};
use crate::kinematics::{Configuration, Velocity};
use crate::model::{FloatingBaseModel, Joint, JointKind, Link, Shape};
use crate::spatial::{Mat3, MotionVector, Pose, Rotation, SpatialInertia, Vec3};

fn rod_inertia(mass: f64, length: f64, along: Vec3) -> SpatialInertia {
    // Thin rod with its frame at the proximal end and the CoM halfway along.
    let transverse = mass * length * length / 12.0;
    let axial = (mass * 1e-4).max(1e-9);
    let d = along.normalize();
    let diag = Vec3::new(
        transverse + (axial - transverse) * d.x.abs(),
        transverse + (axial - transverse) * d.y.abs(),
        transverse + (axial - transverse) * d.z.abs(),
    );
    SpatialInertia::new(mass, d * (length / 2.0), Mat3::from_diagonal(&diag))
}

fn block(name: &str, mass: f64, side: f64) -> Link {
    Link {
        name: name.into(),
        shape: Some(Shape::Box {
            width: side,
            height: side,
            depth: side,
        }),
        inertia: SpatialInertia::new(
            mass,
            Vec3::zeros(),
            Mat3::identity() * (mass * side * side / 6.0),
        ),
    }
}

/// Planar chain along +x with z-axis revolute joints: the first joint sits at
/// the base origin, later joints at the distal end of each link.
///
/// With one joint this is the single pendulum, with two the planar double
/// pendulum (gravity acts out of plane; use [`hanging_chain`] when gravity
/// torques matter).
pub fn planar_chain(joints: usize, link_mass: f64, link_length: f64) -> FloatingBaseModel {
    chain(joints, link_mass, link_length, Vec3::x(), Vec3::z())
}

/// Chain hanging along -z with y-axis revolute joints, so gravity acts in
/// the motion plane (textbook pendulum geometry).
pub fn hanging_chain(joints: usize, link_mass: f64, link_length: f64) -> FloatingBaseModel {
    chain(joints, link_mass, link_length, -Vec3::z(), Vec3::y())
}

fn chain(
    joints: usize,
    link_mass: f64,
    link_length: f64,
    direction: Vec3,
    axis: Vec3,
) -> FloatingBaseModel {
    let mut links = vec![block("base", 1.0, 0.1)];
    let mut joint_list = Vec::new();
    for k in 0..joints {
        links.push(Link {
            name: format!("link{}", k + 1),
            shape: None,
            inertia: rod_inertia(link_mass, link_length, direction),
        });
        joint_list.push(Joint {
            name: format!("joint{}", k + 1),
            parent: k,
            child: k + 1,
            origin: if k == 0 {
                Pose::identity()
            } else {
                Pose::from_translation(direction * link_length)
            },
            kind: JointKind::Revolute { axis },
            limits: None,
        });
    }
    FloatingBaseModel::new("chain".into(), links, joint_list).expect("valid chain")
}

/// Five-link floating chain with alternating y/x axes, the workhorse for
/// random-state dynamics checks.
pub fn five_link_floating_chain() -> FloatingBaseModel {
    let mut links = vec![block("base", 2.0, 0.15)];
    let mut joints = Vec::new();
    let length = 0.4;
    for k in 0..4 {
        links.push(Link {
            name: format!("link{}", k + 1),
            shape: None,
            inertia: rod_inertia(0.8, length, -Vec3::z()),
        });
        joints.push(Joint {
            name: format!("joint{}", k + 1),
            parent: k,
            child: k + 1,
            origin: if k == 0 {
                Pose::from_translation(Vec3::new(0.0, 0.0, -0.1))
            } else {
                Pose::from_translation(Vec3::new(0.0, 0.0, -length))
            },
            kind: JointKind::Revolute {
                axis: if k % 2 == 0 { Vec3::y() } else { Vec3::x() },
            },
            limits: None,
        });
    }
    FloatingBaseModel::new("five-link".into(), links, joints).expect("valid chain")
}

/// Desk-scale human analogue: a pelvis base with two fixed feet, a torso and
/// a hand link, both on y-axis revolute joints.
///
/// Feet and hand are the external-wrench attachment links used by the
/// estimation scenarios.
pub fn human_analogue() -> FloatingBaseModel {
    let links = vec![
        block("pelvis", 10.0, 0.25),
        Link {
            name: "leftfoot".into(),
            shape: Some(Shape::Box {
                width: 0.2,
                height: 0.08,
                depth: 0.1,
            }),
            inertia: SpatialInertia::new(1.0, Vec3::zeros(), Mat3::identity() * 0.004),
        },
        Link {
            name: "rightfoot".into(),
            shape: Some(Shape::Box {
                width: 0.2,
                height: 0.08,
                depth: 0.1,
            }),
            inertia: SpatialInertia::new(1.0, Vec3::zeros(), Mat3::identity() * 0.004),
        },
        Link {
            name: "torso".into(),
            shape: None,
            inertia: rod_inertia(8.0, 0.5, Vec3::z()),
        },
        Link {
            name: "hand".into(),
            shape: None,
            inertia: rod_inertia(2.0, 0.4, Vec3::z()),
        },
    ];
    let joints = vec![
        Joint {
            name: "leftankle".into(),
            parent: 0,
            child: 1,
            origin: Pose::from_translation(Vec3::new(0.0, 0.12, -0.5)),
            kind: JointKind::Fixed,
            limits: None,
        },
        Joint {
            name: "rightankle".into(),
            parent: 0,
            child: 2,
            origin: Pose::from_translation(Vec3::new(0.0, -0.12, -0.5)),
            kind: JointKind::Fixed,
            limits: None,
        },
        Joint {
            name: "waist".into(),
            parent: 0,
            child: 3,
            origin: Pose::from_translation(Vec3::new(0.0, 0.0, 0.15)),
            kind: JointKind::Revolute { axis: Vec3::y() },
            limits: Some((-1.5, 1.5)),
        },
        Joint {
            name: "shoulder".into(),
            parent: 3,
            child: 4,
            origin: Pose::from_translation(Vec3::new(0.0, 0.0, 0.5)),
            kind: JointKind::Revolute { axis: Vec3::y() },
            limits: Some((-2.5, 2.5)),
        },
    ];
    FloatingBaseModel::new("human-analogue".into(), links, joints).expect("valid model")
}

/// Two-link arm on a heavy base with y- then x-axis joints, used in pairs
/// for the coupled agent-robot scenarios.
pub fn two_link_arm(name: &str) -> FloatingBaseModel {
    let mut links = vec![block("base", 6.0, 0.2)];
    let mut joints = Vec::new();
    let length = 0.5;
    for k in 0..2 {
        links.push(Link {
            name: format!("link{}", k + 1),
            shape: None,
            inertia: rod_inertia(1.5, length, Vec3::z()),
        });
        joints.push(Joint {
            name: format!("joint{}", k + 1),
            parent: k,
            child: k + 1,
            origin: if k == 0 {
                Pose::from_translation(Vec3::new(0.0, 0.0, 0.1))
            } else {
                Pose::from_translation(Vec3::new(0.0, 0.0, length))
            },
            kind: JointKind::Revolute {
                axis: if k == 0 { Vec3::y() } else { Vec3::x() },
            },
            limits: None,
        });
    }
    FloatingBaseModel::new(name.into(), links, joints).expect("valid arm")
}

/// Two identical two-link arms facing each other, bases welded to the
/// ground and tips rigidly joined: the coupled test scenario.
pub fn coupled_twin_arms() -> CoupledSystem {
    let ea_model = two_link_arm("external-agent");
    let r_model = two_link_arm("robot");
    let mut q_ea = Configuration::neutral(&ea_model);
    q_ea.base_pose = Pose::from_translation(Vec3::new(-0.4, 0.0, 0.0));
    q_ea.joint_pos[0] = -0.5;
    q_ea.joint_pos[1] = 1.0;
    let mut q_r = Configuration::neutral(&r_model);
    q_r.base_pose = Pose::new(
        Rotation::about_z(std::f64::consts::PI),
        Vec3::new(0.4, 0.0, 0.0),
    );
    q_r.joint_pos[0] = -0.5;
    q_r.joint_pos[1] = 1.0;
    let tip = ContactPoint {
        link: 2,
        frame_in_link: Pose::from_translation(Vec3::new(0.0, 0.0, 0.5)),
    };
    CoupledSystem {
        ea: AgentState {
            env_contacts: ContactSet::new(vec![ContactPoint::at_origin(0)]),
            q: q_ea,
            v: Velocity::zero(&ea_model),
            model: ea_model,
        },
        robot: AgentState {
            env_contacts: ContactSet::new(vec![ContactPoint::at_origin(0)]),
            q: q_r,
            v: Velocity::zero(&r_model),
            model: r_model,
        },
        mutual: MutualContact {
            ea_point: tip.clone(),
            robot_point: tip,
            kind: MutualKind::Point,
        },
        gravity: Vec3::new(0.0, 0.0, -9.81),
    }
}

/// Uniformly random configuration and velocity, for property sweeps.
pub fn random_state<R: Rng>(model: &FloatingBaseModel, rng: &mut R) -> (Configuration, Velocity) {
    let rotvec = Vec3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    );
    let base_pose = Pose::new(
        Rotation::exp(&rotvec),
        Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ),
    );
    let joint_pos = DVector::from_fn(model.dof(), |_, _| rng.random_range(-1.2..1.2));
    let base_vel = MotionVector::new(
        Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ),
        Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ),
    );
    let joint_vel = DVector::from_fn(model.dof(), |_, _| rng.random_range(-1.0..1.0));
    (
        Configuration::new(base_pose, joint_pos),
        Velocity::new(base_vel, joint_vel),
    )
}
