use crate::spatial::{Mat3, SpatialInertia, Vec3};

/// Link geometry primitives; dimensions in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    /// Rectangular parallelepiped with width, height and depth.
    Box { width: f64, height: f64, depth: f64 },
    /// Circular cylinder with its axis along the local y direction.
    Cylinder { radius: f64, height: f64 },
    Sphere { radius: f64 },
}

impl Shape {
    pub fn dims_positive(&self) -> bool {
        match *self {
            Shape::Box {
                width,
                height,
                depth,
            } => width > 0.0 && height > 0.0 && depth > 0.0,
            Shape::Cylinder { radius, height } => radius > 0.0 && height > 0.0,
            Shape::Sphere { radius } => radius > 0.0,
        }
    }
}

/// Principal moments of inertia for a homogeneous body of the given shape,
/// with the center of mass at the geometric center.
pub fn inertia_from_shape(shape: &Shape, mass: f64) -> SpatialInertia {
    let diag = match *shape {
        Shape::Box {
            width: a,
            height: b,
            depth: c,
        } => Vec3::new(
            mass / 12.0 * (a * a + b * b),
            mass / 12.0 * (b * b + c * c),
            mass / 12.0 * (c * c + a * a),
        ),
        Shape::Cylinder { radius: r, height: h } => Vec3::new(
            mass / 12.0 * (3.0 * r * r + h * h),
            mass / 2.0 * r * r,
            mass / 12.0 * (3.0 * r * r + h * h),
        ),
        Shape::Sphere { radius: r } => Vec3::repeat(0.4 * mass * r * r),
    };
    SpatialInertia::new(mass, Vec3::zeros(), Mat3::from_diagonal(&diag))
}
