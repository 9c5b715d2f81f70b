use super::{
    ForceVector, Mat3, Mat6, MotionVector, Pose, Rotation, SpatialError, SpatialInertia, Vec3,
    ANTISYMMETRY_TOL,
};

/// Skew-symmetric matrix of `v`, so that `skew(v) * u == v.cross(u)`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`skew`]; rejects matrices whose symmetric part is above
/// [`ANTISYMMETRY_TOL`].
pub fn vee(a: &Mat3) -> Result<Vec3, SpatialError> {
    let residual = (a + a.transpose()).norm();
    if residual > ANTISYMMETRY_TOL {
        return Err(SpatialError::NotAntisymmetric { residual });
    }
    Ok(Vec3::new(a[(2, 1)], a[(0, 2)], a[(1, 0)]))
}

/// Change-of-frame matrix for motion vectors.
///
/// With `rel` the pose of frame B expressed in frame A, the returned matrix
/// maps motion vectors expressed in A to motion vectors expressed in B:
/// `[R', -R' S(p); 0, R']` with `R' = R^T`.
pub fn adjoint_motion(rel: &Pose) -> Mat6 {
    let rt = rel.rotation.matrix().transpose();
    let coupling = -rt * skew(&rel.position);
    let mut x = Mat6::zeros();
    x.fixed_view_mut::<3, 3>(0, 0).copy_from(&rt);
    x.fixed_view_mut::<3, 3>(0, 3).copy_from(&coupling);
    x.fixed_view_mut::<3, 3>(3, 3).copy_from(&rt);
    x
}

/// Change-of-frame matrix for force vectors, dual of [`adjoint_motion`]:
/// `[R', 0; -R' S(p), R']`.
///
/// For any pose the pairing `<adjoint_motion(P) m, adjoint_force(P) f>`
/// equals `<m, f>`.
pub fn adjoint_force(rel: &Pose) -> Mat6 {
    let rt = rel.rotation.matrix().transpose();
    let coupling = -rt * skew(&rel.position);
    let mut x = Mat6::zeros();
    x.fixed_view_mut::<3, 3>(0, 0).copy_from(&rt);
    x.fixed_view_mut::<3, 3>(3, 0).copy_from(&coupling);
    x.fixed_view_mut::<3, 3>(3, 3).copy_from(&rt);
    x
}

/// 6x6 cross-product operator for motion vectors.
pub fn motion_cross(v: &MotionVector) -> Mat6 {
    let sw = skew(&v.angular);
    let sv = skew(&v.linear);
    let mut x = Mat6::zeros();
    x.fixed_view_mut::<3, 3>(0, 0).copy_from(&sw);
    x.fixed_view_mut::<3, 3>(0, 3).copy_from(&sv);
    x.fixed_view_mut::<3, 3>(3, 3).copy_from(&sw);
    x
}

/// Dual 6x6 cross-product operator acting on force vectors; equals
/// `-motion_cross(v)^T`.
pub fn force_cross_dual(v: &MotionVector) -> Mat6 {
    let sw = skew(&v.angular);
    let sv = skew(&v.linear);
    let mut x = Mat6::zeros();
    x.fixed_view_mut::<3, 3>(0, 0).copy_from(&sw);
    x.fixed_view_mut::<3, 3>(3, 0).copy_from(&sv);
    x.fixed_view_mut::<3, 3>(3, 3).copy_from(&sw);
    x
}

/// Newton-Euler equation for one rigid body: net wrench `I a + v x* (I v)`.
pub fn rigid_body_newton_euler(
    inertia: &SpatialInertia,
    v: &MotionVector,
    a: &MotionVector,
) -> ForceVector {
    inertia.apply(a) + v.cross_force(&inertia.apply(v))
}

/// Orientation distance: vee of the antisymmetric part of `from^T * to`.
///
/// For small relative angles this is the rotation vector carrying `from`
/// onto `to`; it is exactly zero iff the relative rotation is symmetric.
pub fn rotation_distance(from: &Rotation, to: &Rotation) -> Vec3 {
    let rel = from.matrix().transpose() * to.matrix();
    let antisym = (rel - rel.transpose()) * 0.5;
    Vec3::new(antisym[(2, 1)], antisym[(0, 2)], antisym[(1, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn skew_zero_is_zero_matrix() {
        assert_eq!(skew(&Vec3::zeros()), Mat3::zeros());
    }

    #[test]
    fn skew_basis_right_handed() {
        assert_relative_eq!(skew(&Vec3::x()) * Vec3::y(), Vec3::z(), epsilon = 1e-15);
    }

    #[test]
    fn skew_matches_hand_cross_product() {
        let v = Vec3::new(1.0, 2.0, 3.0);
        let u = Vec3::new(4.0, 5.0, 6.0);
        assert_relative_eq!(skew(&v) * u, Vec3::new(-3.0, 6.0, -3.0), epsilon = 1e-15);
    }

    #[test]
    fn vee_inverts_skew() {
        let v = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(vee(&skew(&v)).unwrap(), v);
        assert_eq!(vee(&Mat3::zeros()).unwrap(), Vec3::zeros());
    }

    #[test]
    fn vee_rejects_symmetric_input() {
        let sym = Mat3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            vee(&sym),
            Err(SpatialError::NotAntisymmetric { .. })
        ));
    }

    #[test]
    fn adjoint_motion_identity() {
        assert_relative_eq!(adjoint_motion(&Pose::identity()), Mat6::identity());
    }

    #[test]
    fn adjoint_motion_pure_rotation_is_block_diagonal() {
        let r = Rotation::about_z(0.9);
        let x = adjoint_motion(&Pose::from_rotation(r));
        let rt = r.matrix().transpose();
        assert_relative_eq!(Mat3::from(x.fixed_view::<3, 3>(0, 0)), rt, epsilon = 1e-12);
        assert_relative_eq!(Mat3::from(x.fixed_view::<3, 3>(3, 3)), rt, epsilon = 1e-12);
        assert_relative_eq!(
            Mat3::from(x.fixed_view::<3, 3>(0, 3)),
            Mat3::zeros(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            Mat3::from(x.fixed_view::<3, 3>(3, 0)),
            Mat3::zeros(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn adjoint_motion_translation_couples_rotation_into_linear() {
        // Frame offset (0,0,1); a body spinning about x gains -e2 linear
        // velocity at the offset origin.
        let rel = Pose::from_translation(Vec3::new(0.0, 0.0, 1.0));
        let m = MotionVector::new(Vec3::zeros(), Vec3::x());
        let out = m.change_frame(&rel);
        assert_relative_eq!(out.linear, Vec3::new(0.0, -1.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(out.angular, Vec3::x(), epsilon = 1e-15);
        let via_matrix = adjoint_motion(&rel) * m.to_vector();
        assert_relative_eq!(via_matrix, out.to_vector(), epsilon = 1e-15);
    }

    #[test]
    fn adjoint_force_identity() {
        assert_relative_eq!(adjoint_force(&Pose::identity()), Mat6::identity());
    }

    #[test]
    fn adjoint_force_translation_moves_moment() {
        // A pure force e1 seen from a frame at (0,0,1) picks up a unit moment
        // about y.
        let rel = Pose::from_translation(Vec3::new(0.0, 0.0, 1.0));
        let f = ForceVector::new(Vec3::x(), Vec3::zeros());
        let out = f.change_frame(&rel);
        assert_relative_eq!(out.force, Vec3::x(), epsilon = 1e-15);
        assert_relative_eq!(out.moment, Vec3::new(0.0, -1.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(out.moment.norm(), 1.0, epsilon = 1e-15);
        let via_matrix = adjoint_force(&rel) * f.to_vector();
        assert_relative_eq!(via_matrix, out.to_vector(), epsilon = 1e-15);
    }

    #[test]
    fn adjoint_duality_pairing() {
        let pose = Pose::new(Rotation::about_y(0.4) * Rotation::about_x(1.3), Vec3::new(0.2, -1.0, 0.7));
        let m = MotionVector::new(Vec3::new(0.1, 0.5, -0.3), Vec3::new(-0.2, 0.8, 0.4));
        let f = ForceVector::new(Vec3::new(2.0, -1.0, 0.5), Vec3::new(0.3, 0.9, -2.1));
        // The force adjoint of the inverse pose, transposed, is the motion
        // adjoint of the pose itself.
        assert_relative_eq!(
            adjoint_force(&pose.inverse()).transpose(),
            adjoint_motion(&pose),
            epsilon = 1e-9
        );
        // The paired transforms leave the power invariant.
        let paired = (adjoint_motion(&pose) * m.to_vector())
            .dot(&(adjoint_force(&pose) * f.to_vector()));
        assert_relative_eq!(paired, f.dot(&m), epsilon = 1e-9);
    }

    #[test]
    fn adjoint_chain_composition() {
        // Frames A -> B -> C: re-expressing in two hops equals the adjoint of
        // the composed pose.
        let a_h_b = Pose::new(Rotation::about_z(0.3), Vec3::new(1.0, 0.0, -0.5));
        let b_h_c = Pose::new(Rotation::about_x(-1.1), Vec3::new(0.0, 2.0, 0.25));
        let direct = adjoint_motion(&(a_h_b * b_h_c));
        let chained = adjoint_motion(&b_h_c) * adjoint_motion(&a_h_b);
        assert_relative_eq!(direct, chained, epsilon = 1e-9);
    }

    #[test]
    fn motion_cross_zero_and_self_annihilation() {
        assert_eq!(motion_cross(&MotionVector::zero()), Mat6::zeros());
        let v = MotionVector::new(Vec3::new(0.3, -0.8, 1.1), Vec3::new(-0.4, 0.2, 0.9));
        assert_relative_eq!(
            motion_cross(&v) * v.to_vector(),
            nalgebra::Vector6::zeros(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn dual_cross_is_negative_transpose() {
        let v = MotionVector::new(Vec3::new(1.5, -0.2, 0.4), Vec3::new(0.7, 0.1, -1.3));
        assert_relative_eq!(
            force_cross_dual(&v),
            -motion_cross(&v).transpose(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn newton_euler_zero_motion_gives_zero_wrench() {
        let inertia = SpatialInertia::new(2.0, Vec3::new(0.1, 0.0, 0.0), Mat3::identity() * 0.2);
        let f = rigid_body_newton_euler(&inertia, &MotionVector::zero(), &MotionVector::zero());
        assert_eq!(f, ForceVector::zero());
    }

    #[test]
    fn newton_euler_point_mass_linear_acceleration() {
        let inertia = SpatialInertia::new(3.0, Vec3::zeros(), Mat3::zeros());
        let a = MotionVector::new(Vec3::new(0.0, 0.0, 2.0), Vec3::zeros());
        let f = rigid_body_newton_euler(&inertia, &MotionVector::zero(), &a);
        assert_relative_eq!(f.force, Vec3::new(0.0, 0.0, 6.0), epsilon = 1e-12);
        assert_relative_eq!(f.moment, Vec3::zeros(), epsilon = 1e-12);
    }

    #[test]
    fn newton_euler_gyroscopic_moment() {
        // Diagonal inertia spinning off-axis, zero acceleration: the wrench is
        // the gyroscopic moment w x (I_c w).
        let ic = Mat3::from_diagonal(&Vec3::new(0.1, 0.2, 0.4));
        let inertia = SpatialInertia::new(1.0, Vec3::zeros(), ic);
        let w = Vec3::new(1.0, 2.0, 3.0);
        let v = MotionVector::new(Vec3::zeros(), w);
        let f = rigid_body_newton_euler(&inertia, &v, &MotionVector::zero());
        assert_relative_eq!(f.moment, w.cross(&(ic * w)), epsilon = 1e-12);
        assert_relative_eq!(f.force, Vec3::zeros(), epsilon = 1e-12);
    }

    #[test]
    fn rotation_distance_examples() {
        let rd = Rotation::about_x(0.3) * Rotation::about_y(-0.2);
        assert_relative_eq!(rotation_distance(&rd, &rd), Vec3::zeros(), epsilon = 1e-15);

        let eps = 1e-3;
        let r = rd * Rotation::about_z(eps);
        let d = rotation_distance(&rd, &r);
        assert_relative_eq!(d, Vec3::new(0.0, 0.0, eps), epsilon = 1e-8);
    }

    #[test]
    fn rotation_distance_antisymmetry_for_small_angles() {
        let a = Rotation::about_x(0.2) * Rotation::about_z(0.4);
        let b = a * Rotation::exp(&Vec3::new(2e-4, -3e-4, 1e-4));
        let fwd = rotation_distance(&a, &b);
        let bwd = rotation_distance(&b, &a);
        assert_relative_eq!(fwd, -bwd, epsilon = 1e-6);
    }
}
