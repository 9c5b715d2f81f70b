use super::{ops::skew, ForceVector, Mat3, Mat6, MotionVector, Vec3};

/// Spatial inertia of a rigid body about its body-frame origin.
///
/// Stored as mass, center-of-mass offset from the body origin, and the 3x3
/// rotational inertia taken at the center of mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialInertia {
    mass: f64,
    com: Vec3,
    inertia_com: Mat3,
}

impl SpatialInertia {
    pub fn new(mass: f64, com: Vec3, inertia_com: Mat3) -> Self {
        Self {
            mass,
            com,
            inertia_com,
        }
    }

    pub fn zero() -> Self {
        Self {
            mass: 0.0,
            com: Vec3::zeros(),
            inertia_com: Mat3::zeros(),
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn com(&self) -> &Vec3 {
        &self.com
    }

    pub fn inertia_at_com(&self) -> &Mat3 {
        &self.inertia_com
    }

    /// Rotational inertia about the body origin (parallel axis theorem).
    pub fn inertia_at_origin(&self) -> Mat3 {
        let sc = skew(&self.com);
        self.inertia_com - sc * sc * self.mass
    }

    /// 6x6 realization in the linear-first layout:
    /// `[m I, -m S(c); m S(c), I_c - m S(c) S(c)]`.
    pub fn to_matrix(&self) -> Mat6 {
        let msc = skew(&self.com) * self.mass;
        let mut m = Mat6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(Mat3::identity() * self.mass));
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-msc));
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&msc);
        m.fixed_view_mut::<3, 3>(3, 3)
            .copy_from(&self.inertia_at_origin());
        m
    }

    /// `I * m`: momentum for a velocity, or inertial wrench for an
    /// acceleration.
    pub fn apply(&self, m: &MotionVector) -> ForceVector {
        ForceVector {
            force: self.mass * (m.linear - self.com.cross(&m.angular)),
            moment: self.mass * self.com.cross(&m.linear) + self.inertia_at_origin() * m.angular,
        }
    }

    pub fn kinetic_energy(&self, v: &MotionVector) -> f64 {
        0.5 * self.apply(v).dot(v)
    }

    pub fn is_positive_definite(&self) -> bool {
        nalgebra::Cholesky::new(self.to_matrix()).is_some()
    }
}
