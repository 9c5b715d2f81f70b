use std::ops::Mul;

use super::{ops::skew, Mat3, SpatialError, Vec3, RENORMALIZE_THRESHOLD, ROTATION_TOL};

/// An element of SO(3), stored as an orthonormal 3x3 matrix with det = +1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    mat: Mat3,
}

impl Rotation {
    pub fn identity() -> Self {
        Self {
            mat: Mat3::identity(),
        }
    }

    /// Wraps a matrix after checking orthonormality and determinant.
    pub fn from_matrix(mat: Mat3) -> Result<Self, SpatialError> {
        let ortho = (mat.transpose() * mat - Mat3::identity()).norm();
        if ortho > ROTATION_TOL {
            return Err(SpatialError::NotARotation {
                reason: format!("R'R - I residual {ortho:.3e}"),
            });
        }
        let det = mat.determinant();
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(SpatialError::NotARotation {
                reason: format!("determinant {det:.12}"),
            });
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix that is trusted to already be orthonormal.
    pub fn from_matrix_unchecked(mat: Mat3) -> Self {
        Self { mat }
    }

    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::identity();
        }
        Self::exp(&(axis * (angle / n)))
    }

    pub fn about_x(angle: f64) -> Self {
        Self::from_axis_angle(&Vec3::x(), angle)
    }

    pub fn about_y(angle: f64) -> Self {
        Self::from_axis_angle(&Vec3::y(), angle)
    }

    pub fn about_z(angle: f64) -> Self {
        Self::from_axis_angle(&Vec3::z(), angle)
    }

    /// Exponential map: Rodrigues' formula on the rotation vector `omega`.
    pub fn exp(omega: &Vec3) -> Self {
        let angle = omega.norm();
        if angle < 1e-12 {
            let s = skew(omega);
            return Self {
                mat: Mat3::identity() + s + s * s * 0.5,
            }
            .renormalized();
        }
        let axis = omega / angle;
        let s = skew(&axis);
        let mat = Mat3::identity() + s * angle.sin() + s * s * (1.0 - angle.cos());
        Self { mat }
    }

    /// Rotation vector whose exponential reproduces `self`.
    pub fn log(&self) -> Vec3 {
        let trace = self.mat.trace();
        let cos = ((trace - 1.0) * 0.5).clamp(-1.0, 1.0);
        let angle = cos.acos();
        if angle < 1e-9 {
            // First-order: vee of the antisymmetric part.
            return Vec3::new(
                (self.mat[(2, 1)] - self.mat[(1, 2)]) * 0.5,
                (self.mat[(0, 2)] - self.mat[(2, 0)]) * 0.5,
                (self.mat[(1, 0)] - self.mat[(0, 1)]) * 0.5,
            );
        }
        if (std::f64::consts::PI - angle) < 1e-6 {
            // Near pi the antisymmetric part degenerates; take the axis from
            // the symmetric part instead.
            let b = (self.mat + Mat3::identity()) * 0.5;
            let axis = Vec3::new(b[(0, 0)].sqrt(), b[(1, 1)].sqrt(), b[(2, 2)].sqrt());
            let mut axis = axis;
            if self.mat[(2, 1)] - self.mat[(1, 2)] < 0.0 {
                axis.x = -axis.x;
            }
            if self.mat[(0, 2)] - self.mat[(2, 0)] < 0.0 {
                axis.y = -axis.y;
            }
            if self.mat[(1, 0)] - self.mat[(0, 1)] < 0.0 {
                axis.z = -axis.z;
            }
            return axis.normalize() * angle;
        }
        let factor = angle / (2.0 * angle.sin());
        Vec3::new(
            self.mat[(2, 1)] - self.mat[(1, 2)],
            self.mat[(0, 2)] - self.mat[(2, 0)],
            self.mat[(1, 0)] - self.mat[(0, 1)],
        ) * factor
    }

    /// Closest rotation by polar decomposition (SVD with determinant fix).
    pub fn renormalized(&self) -> Self {
        let svd = self.mat.svd(true, true);
        let u = svd.u.expect("svd of 3x3 always succeeds");
        let vt = svd.v_t.expect("svd of 3x3 always succeeds");
        let mut r = u * vt;
        if r.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            r = u * vt;
        }
        Self { mat: r }
    }

    /// Applies the exponential update `exp(omega * dt) * R`, re-projecting to
    /// SO(3) when numerical drift exceeds the threshold.
    pub fn integrated(&self, omega: &Vec3, dt: f64) -> Self {
        let next = Self::exp(&(omega * dt)) * *self;
        let drift = (next.mat.transpose() * next.mat - Mat3::identity()).norm();
        if drift > RENORMALIZE_THRESHOLD {
            next.renormalized()
        } else {
            next
        }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.mat
    }

    pub fn transpose(&self) -> Self {
        Self {
            mat: self.mat.transpose(),
        }
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.mat * v
    }

    pub fn rotate_back(&self, v: &Vec3) -> Vec3 {
        self.mat.transpose() * v
    }

    /// Angle of the relative rotation between `self` and `other`.
    pub fn angle_to(&self, other: &Rotation) -> f64 {
        (self.transpose() * *other).log().norm()
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation {
            mat: self.mat * rhs.mat,
        }
    }
}
