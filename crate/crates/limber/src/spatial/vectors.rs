use std::ops::{Add, Mul, Neg, Sub};

use super::{Pose, Vec3, Vec6};

/// 6D motion vector (velocity or acceleration), linear part first.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MotionVector {
    pub linear: Vec3,
    pub angular: Vec3,
}

/// 6D force vector (wrench), force first then moment.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ForceVector {
    pub force: Vec3,
    pub moment: Vec3,
}

impl MotionVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(linear: Vec3, angular: Vec3) -> Self {
        Self { linear, angular }
    }

    pub fn from_vector(v: &Vec6) -> Self {
        Self {
            linear: Vec3::new(v[0], v[1], v[2]),
            angular: Vec3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_vector(&self) -> Vec6 {
        Vec6::new(
            self.linear.x,
            self.linear.y,
            self.linear.z,
            self.angular.x,
            self.angular.y,
            self.angular.z,
        )
    }

    /// Motion cross product `self x other`.
    pub fn cross_motion(&self, other: &MotionVector) -> MotionVector {
        MotionVector {
            linear: self.angular.cross(&other.linear) + self.linear.cross(&other.angular),
            angular: self.angular.cross(&other.angular),
        }
    }

    /// Dual cross product `self x* f` acting on force vectors.
    pub fn cross_force(&self, f: &ForceVector) -> ForceVector {
        ForceVector {
            force: self.angular.cross(&f.force),
            moment: self.linear.cross(&f.force) + self.angular.cross(&f.moment),
        }
    }

    /// Re-expresses the motion from frame A to frame B, where `rel` is the
    /// pose of B in A.
    pub fn change_frame(&self, rel: &Pose) -> MotionVector {
        let rot = rel.rotation.inverse();
        MotionVector {
            linear: rot.rotate(&(self.linear + self.angular.cross(&rel.position))),
            angular: rot.rotate(&self.angular),
        }
    }
}

impl ForceVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(force: Vec3, moment: Vec3) -> Self {
        Self { force, moment }
    }

    pub fn from_vector(v: &Vec6) -> Self {
        Self {
            force: Vec3::new(v[0], v[1], v[2]),
            moment: Vec3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_vector(&self) -> Vec6 {
        Vec6::new(
            self.force.x,
            self.force.y,
            self.force.z,
            self.moment.x,
            self.moment.y,
            self.moment.z,
        )
    }

    /// Re-expresses the wrench from frame A to frame B, where `rel` is the
    /// pose of B in A.
    pub fn change_frame(&self, rel: &Pose) -> ForceVector {
        let rot = rel.rotation.inverse();
        ForceVector {
            force: rot.rotate(&self.force),
            moment: rot.rotate(&(self.moment - rel.position.cross(&self.force))),
        }
    }

    /// Duality pairing `<motion, force>`: the instantaneous power.
    pub fn dot(&self, m: &MotionVector) -> f64 {
        self.force.dot(&m.linear) + self.moment.dot(&m.angular)
    }
}

impl Add for MotionVector {
    type Output = MotionVector;
    fn add(self, rhs: Self) -> Self {
        Self {
            linear: self.linear + rhs.linear,
            angular: self.angular + rhs.angular,
        }
    }
}

impl Sub for MotionVector {
    type Output = MotionVector;
    fn sub(self, rhs: Self) -> Self {
        Self {
            linear: self.linear - rhs.linear,
            angular: self.angular - rhs.angular,
        }
    }
}

impl Mul<f64> for MotionVector {
    type Output = MotionVector;
    fn mul(self, rhs: f64) -> Self {
        Self {
            linear: self.linear * rhs,
            angular: self.angular * rhs,
        }
    }
}

impl Neg for MotionVector {
    type Output = MotionVector;
    fn neg(self) -> Self {
        Self {
            linear: -self.linear,
            angular: -self.angular,
        }
    }
}

impl Add for ForceVector {
    type Output = ForceVector;
    fn add(self, rhs: Self) -> Self {
        Self {
            force: self.force + rhs.force,
            moment: self.moment + rhs.moment,
        }
    }
}

impl Sub for ForceVector {
    type Output = ForceVector;
    fn sub(self, rhs: Self) -> Self {
        Self {
            force: self.force - rhs.force,
            moment: self.moment - rhs.moment,
        }
    }
}

impl Mul<f64> for ForceVector {
    type Output = ForceVector;
    fn mul(self, rhs: f64) -> Self {
        Self {
            force: self.force * rhs,
            moment: self.moment * rhs,
        }
    }
}

impl Neg for ForceVector {
    type Output = ForceVector;
    fn neg(self) -> Self {
        Self {
            force: -self.force,
            moment: -self.moment,
        }
    }
}
