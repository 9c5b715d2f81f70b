use nalgebra::{DMatrix, DVector, Matrix6};

use super::variables::VariableLayout;
use crate::dynamics::proper_accelerations;
use crate::kinematics::{forward_kinematics, Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{adjoint_force, adjoint_motion, MotionVector, Vec3, Vec6};

/// Sparse-structured linear model constraints `D d + b_D = 0` at `(q, nu)`.
///
/// Row groups, 18 per link plus one per dof:
/// - 6 per link: acceleration recursion (for the base slot, the whole-body
///   wrench balance in the base frame, which closes the floating-base
///   boundary),
/// - 6 per link: Newton-Euler wrench balance in the link frame,
/// - 6 per link: the same balance re-expressed in world axes,
/// - 1 per dof: the recursion projected on the joint axis.
#[derive(Clone, Debug)]
pub struct ConstraintModel {
    pub d: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub layout: VariableLayout,
}

impl ConstraintModel {
    pub fn rows(&self) -> usize {
        self.d.nrows()
    }

    /// Residual of the constraints for a candidate `d`.
    pub fn residual(&self, d: &DVector<f64>) -> DVector<f64> {
        &self.d * d + &self.bias
    }
}

pub fn build_constraint_model(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
) -> ConstraintModel {
    let layout = VariableLayout::of(model);
    let nb = layout.links;
    let rows = 18 * nb + layout.dofs;
    let mut d = DMatrix::zeros(rows, layout.len());
    let mut bias = DVector::zeros(rows);

    // Velocity-dependent terms come from the same forward pass used by the
    // inverse dynamics; accelerations are irrelevant here and set to zero.
    let kin = proper_accelerations(
        model,
        q,
        velocity,
        &crate::dynamics::Acceleration::zero(model),
        &Vec3::zeros(),
    );
    let poses = forward_kinematics(model, q);
    let base_inv = poses[0].inverse();

    // Group A: rows [0, 6 nb). Base slot first.
    {
        // Whole-body balance in the base frame: for every link,
        // X*_{B<-Li} (I_i a_i + v x* I v - f^x_i) summed equals zero.
        for i in 0..nb {
            let rel_to_base = (base_inv * poses[i]).inverse();
            let xf = adjoint_force(&rel_to_base);
            let inertia6 = model.link(i).inertia.to_matrix();
            add_block(&mut d, 0, layout.link_acceleration(i), &(xf * inertia6));
            add_block(&mut d, 0, layout.link_wrench(i), &(-xf));
            let v = &kin.body_velocities[i];
            let gyro = v.cross_force(&model.link(i).inertia.apply(v));
            add_bias(&mut bias, 0, &(xf * gyro.to_vector()));
        }
    }
    for (ji, joint) in model.joints().iter().enumerate() {
        let row = 6 * joint.child;
        let qj = model.dof_index(ji).map_or(0.0, |di| q.joint_pos[di]);
        let rel = joint.child_pose_in_parent(qj);
        let xm = adjoint_motion(&rel);
        add_block(
            &mut d,
            row,
            layout.link_acceleration(joint.child),
            &Matrix6::identity(),
        );
        add_block(&mut d, row, layout.link_acceleration(joint.parent), &(-xm));
        if let (Some(di), Some(s)) = (model.dof_index(ji), joint.motion_subspace()) {
            for r in 0..6 {
                d[(row + r, layout.joint_acceleration(di))] = -s[r];
            }
            let sdot = MotionVector::new(
                Vec3::zeros(),
                Vec3::new(s[3], s[4], s[5]) * velocity.joint_vel[di],
            );
            let coriolis = kin.body_velocities[joint.child].cross_motion(&sdot);
            add_bias(&mut bias, row, &(-coriolis.to_vector()));
        }
    }

    // Groups B and C: per-link balance in link frame and in world axes.
    for i in 0..nb {
        let row_b = 6 * nb + 6 * i;
        let row_c = 12 * nb + 6 * i;
        let rot = poses[i].rotation;
        let mut rot6 = Matrix6::zeros();
        rot6.fixed_view_mut::<3, 3>(0, 0).copy_from(rot.matrix());
        rot6.fixed_view_mut::<3, 3>(3, 3).copy_from(rot.matrix());

        let inertia6 = model.link(i).inertia.to_matrix();
        add_block(&mut d, row_b, layout.link_acceleration(i), &inertia6);
        add_block(&mut d, row_c, layout.link_acceleration(i), &(rot6 * inertia6));
        add_block(&mut d, row_b, layout.link_wrench(i), &(-Matrix6::identity()));
        add_block(&mut d, row_c, layout.link_wrench(i), &(-rot6));
        if let Some(pj) = model.parent_joint(i) {
            add_block(&mut d, row_b, layout.joint_wrench(pj), &(-Matrix6::identity()));
            add_block(&mut d, row_c, layout.joint_wrench(pj), &(-rot6));
        }
        for cj in model.child_joints(i) {
            let joint = model.joint(cj);
            let qj = model.dof_index(cj).map_or(0.0, |di| q.joint_pos[di]);
            // Transport the child joint wrench from the child frame into i.
            let xf = adjoint_force(&joint.child_pose_in_parent(qj).inverse());
            add_block(&mut d, row_b, layout.joint_wrench(cj), &xf);
            add_block(&mut d, row_c, layout.joint_wrench(cj), &(rot6 * xf));
        }
        let v = &kin.body_velocities[i];
        let gyro = v.cross_force(&model.link(i).inertia.apply(v)).to_vector();
        add_bias(&mut bias, row_b, &gyro);
        add_bias(&mut bias, row_c, &(rot6 * gyro));
    }

    // Group J: axis projection of the acceleration recursion, one row per
    // dof.
    for (ji, joint) in model.joints().iter().enumerate() {
        let (Some(di), Some(s)) = (model.dof_index(ji), joint.motion_subspace()) else {
            continue;
        };
        let row = 18 * nb + di;
        let qj = q.joint_pos[di];
        let xm = adjoint_motion(&joint.child_pose_in_parent(qj));
        let st = s.transpose();
        let child_coeff = st.clone_owned();
        let parent_coeff = -(st * xm).transpose();
        for r in 0..6 {
            d[(row, layout.link_acceleration(joint.child) + r)] = child_coeff[r];
            d[(row, layout.link_acceleration(joint.parent) + r)] = parent_coeff[r];
        }
        d[(row, layout.joint_acceleration(di))] = -1.0;
        let sdot = MotionVector::new(
            Vec3::zeros(),
            Vec3::new(s[3], s[4], s[5]) * velocity.joint_vel[di],
        );
        let coriolis = kin.body_velocities[joint.child]
            .cross_motion(&sdot)
            .to_vector();
        bias[row] -= s.dot(&coriolis);
    }

    ConstraintModel { d, bias, layout }
}

fn add_block(d: &mut DMatrix<f64>, row: usize, col: usize, block: &Matrix6<f64>) {
    let mut view = d.view_mut((row, col), (6, 6));
    view += block;
}

fn add_bias(bias: &mut DVector<f64>, row: usize, value: &Vec6) {
    let mut view = bias.rows_mut(row, 6);
    view += value;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{rnea, Acceleration};
    use crate::estimation::ground_truth_variables;
    use crate::harness::models::hanging_chain;
    use crate::spatial::ForceVector;

    const G: Vec3 = Vec3::new(0.0, 0.0, -9.81);

    #[test]
    fn row_count_is_18nb_plus_n() {
        let model = hanging_chain(2, 1.0, 0.5);
        let q = Configuration::neutral(&model);
        let cm = build_constraint_model(&model, &q, &Velocity::zero(&model));
        assert_eq!(cm.rows(), 18 * model.num_links() + model.dof());
        assert_eq!(cm.d.ncols(), cm.layout.len());
    }

    #[test]
    fn static_link_ground_truth_is_in_the_nullspace() {
        // A static chain held by a support wrench at the base: the assembled
        // ground-truth d satisfies the constraints to near machine
        // precision.
        let model = hanging_chain(1, 1.2, 0.7);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = 0.5;
        let v = Velocity::zero(&model);
        let a = Acceleration::zero(&model);
        // Support wrench: whatever the base must receive, applied as the
        // base link's external wrench (expressed in the base frame).
        let needed = rnea(&model, &q, &v, &a, &G, &[]).base_wrench;
        let base_rot = q.base_pose.rotation;
        let support = ForceVector::new(
            base_rot.rotate_back(&needed.force),
            base_rot.rotate_back(&needed.moment),
        );
        let ext = vec![support, ForceVector::zero()];
        let d_truth = ground_truth_variables(&model, &q, &v, &a, &G, &ext);
        let cm = build_constraint_model(&model, &q, &v);
        let residual = cm.residual(&d_truth);
        assert!(
            residual.amax() <= 1e-10,
            "constraint residual {:.3e}",
            residual.amax()
        );
    }

    #[test]
    fn dynamic_ground_truth_is_in_the_nullspace() {
        let model = hanging_chain(3, 0.8, 0.4);
        let mut q = Configuration::neutral(&model);
        q.joint_pos[0] = 0.3;
        q.joint_pos[2] = -0.6;
        let mut v = Velocity::zero(&model);
        v.joint_vel[1] = 1.1;
        v.base.angular = Vec3::new(0.2, -0.1, 0.4);
        let mut a = Acceleration::zero(&model);
        a.joint_vel[0] = -0.7;
        a.base.linear = Vec3::new(0.1, 0.0, 0.3);
        let needed = rnea(&model, &q, &v, &a, &G, &[]).base_wrench;
        let base_rot = q.base_pose.rotation;
        let support = ForceVector::new(
            base_rot.rotate_back(&needed.force),
            base_rot.rotate_back(&needed.moment),
        );
        let mut ext = vec![ForceVector::zero(); model.num_links()];
        ext[0] = support;
        let d_truth = ground_truth_variables(&model, &q, &v, &a, &G, &ext);
        let cm = build_constraint_model(&model, &q, &v);
        assert!(
            cm.residual(&d_truth).amax() <= 1e-9,
            "constraint residual {:.3e}",
            cm.residual(&d_truth).amax()
        );
    }

    #[test]
    fn joint_acceleration_column_touches_only_its_joint_rows() {
        let model = hanging_chain(2, 1.0, 0.5);
        let q = Configuration::neutral(&model);
        let cm = build_constraint_model(&model, &q, &Velocity::zero(&model));
        let nb = model.num_links();
        let di = 0usize; // first joint's dof
        let joint_child = model.joint(0).child;
        let col = cm.layout.joint_acceleration(di);
        for row in 0..cm.rows() {
            let coupled = cm.d[(row, col)] != 0.0;
            if !coupled {
                continue;
            }
            let in_accel_rows = row >= 6 * joint_child && row < 6 * joint_child + 6;
            let in_projection_row = row == 18 * nb + di;
            assert!(
                in_accel_rows || in_projection_row,
                "unexpected coupling at row {row}"
            );
        }
    }
}
