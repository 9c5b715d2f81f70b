use nalgebra::{DMatrix, DVector};

use super::matrices::{bias_forces, mass_matrix};
use super::momentum::{center_of_mass, com_velocity};
use super::rnea::Acceleration;
use crate::kinematics::{Configuration, Velocity};
use crate::model::FloatingBaseModel;
use crate::spatial::{skew, Mat3, Vec3};

/// Change of state variables that decouples the base and joint dynamics.
#[derive(Clone, Debug)]
pub struct CentroidalDecomposition {
    /// The velocity transform: `nu_bar = T nu`.
    pub t: DMatrix<f64>,
    pub t_inv: DMatrix<f64>,
    /// Transformed mass matrix `T^-T M T^-1`, block-diagonal with upper
    /// block `diag(m I3, I(q))`.
    pub m_bar: DMatrix<f64>,
    /// Transformed bias `C_bar nu_bar + G_bar`.
    pub h_bar: DVector<f64>,
    /// Transformed gravity term: `m g e3` in the vertical slot.
    pub g_bar: DVector<f64>,
    pub com: Vec3,
    /// Transformed velocity; its first three entries are the CoM velocity.
    pub nu_bar: DVector<f64>,
}

/// Motion transform from the base frame to the centroidal frame:
/// `[I, -S(p_c - p_F); 0, I]`.
fn centroidal_x(com: &Vec3, base: &Vec3) -> nalgebra::Matrix6<f64> {
    let mut x = nalgebra::Matrix6::identity();
    x.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-skew(&(com - base))));
    x
}

/// Builds the centroidal change of variables at `(q, nu)` and transforms the
/// equations of motion.
pub fn centroidal_transform(
    model: &FloatingBaseModel,
    q: &Configuration,
    velocity: &Velocity,
    gravity: &Vec3,
) -> CentroidalDecomposition {
    let n = model.dof();
    let m = mass_matrix(model, q);
    let m_b = m.view((0, 0), (6, 6)).clone_owned();
    let m_bj = m.view((0, 6), (6, n)).clone_owned();
    let com = center_of_mass(model, q);
    let cx = centroidal_x(&com, &q.base_pose.position);
    let m_b_inv = m_b.clone().try_inverse().expect("base inertia invertible");

    let mut t = DMatrix::identity(n + 6, n + 6);
    t.view_mut((0, 0), (6, 6)).copy_from(&cx);
    t.view_mut((0, 6), (6, n)).copy_from(&(cx * &m_b_inv * &m_bj));

    let mut t_inv = DMatrix::identity(n + 6, n + 6);
    let cx_inv = {
        let mut x = nalgebra::Matrix6::identity();
        x.fixed_view_mut::<3, 3>(0, 3)
            .copy_from(&skew(&(com - q.base_pose.position)));
        x
    };
    t_inv.view_mut((0, 0), (6, 6)).copy_from(&cx_inv);
    t_inv
        .view_mut((0, 6), (6, n))
        .copy_from(&(-(&m_b_inv * &m_bj)));

    let m_bar = t_inv.transpose() * &m * &t_inv;

    let total_mass = model.total_mass();
    let mut g_bar = DVector::zeros(n + 6);
    g_bar
        .fixed_rows_mut::<3>(0)
        .copy_from(&(-gravity * total_mass));

    let nu = velocity.to_vector();
    let nu_bar = &t * &nu;

    // h_bar = T^-T (M d/dt(T^-1) nu_bar + h). The d/dt(c_X^-1) block is
    // analytic; the joint-coupling block derivative comes from a central
    // difference of the mass-matrix blocks along the trajectory.
    let h = bias_forces(model, q, velocity, gravity);
    let mut tdot_inv = DMatrix::zeros(n + 6, n + 6);
    let rdot = com_velocity(model, q, velocity) - velocity.base.linear;
    tdot_inv.view_mut((0, 3), (3, 3)).copy_from(&skew(&rdot));
    let eps = 1e-6;
    let q_plus = q.integrated(velocity, eps);
    let q_minus = q.integrated(velocity, -eps);
    let m_plus = mass_matrix(model, &q_plus);
    let m_minus = mass_matrix(model, &q_minus);
    let coupling = |mm: &DMatrix<f64>| -> DMatrix<f64> {
        let b = mm.view((0, 0), (6, 6)).clone_owned();
        let bj = mm.view((0, 6), (6, n)).clone_owned();
        b.try_inverse().expect("base inertia invertible") * bj
    };
    let coupling_dot = (coupling(&m_plus) - coupling(&m_minus)) / (2.0 * eps);
    tdot_inv.view_mut((0, 6), (6, n)).copy_from(&(-coupling_dot));
    let h_bar = t_inv.transpose() * (&m * (&tdot_inv * &nu_bar) + &h);

    CentroidalDecomposition {
        t,
        t_inv,
        m_bar,
        h_bar,
        g_bar,
        com,
        nu_bar,
    }
}

impl CentroidalDecomposition {
    /// Norm of the base/joint coupling block of the transformed mass matrix;
    /// zero when the decoupling is exact.
    pub fn off_diagonal_norm(&self) -> f64 {
        let n = self.m_bar.ncols() - 6;
        self.m_bar.view((0, 6), (6, n)).norm()
    }

    /// Locked rotational inertia at the CoM (lower-right block of the
    /// transformed base inertia).
    pub fn locked_inertia(&self) -> Mat3 {
        self.m_bar.fixed_view::<3, 3>(3, 3).into()
    }

    /// Transforms a system acceleration into centroidal coordinates using
    /// the current transform (valid instantaneously).
    pub fn transform_acceleration(&self, acceleration: &Acceleration) -> DVector<f64> {
        &self.t * acceleration.to_vector()
    }
}
