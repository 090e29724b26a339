use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::math::Pose;

/// Convex collision primitive. Capsules and cylinders are aligned with the
/// local z axis and centered at the local origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Sphere { radius: f64 },
    Capsule { radius: f64, half_length: f64 },
    Box { half_extents: [f64; 3] },
    Cylinder { radius: f64, half_length: f64 },
}

impl Shape {
    pub fn sphere(radius: f64) -> Self {
        Shape::Sphere { radius }
    }

    pub fn capsule(radius: f64, half_length: f64) -> Self {
        Shape::Capsule {
            radius,
            half_length,
        }
    }

    pub fn cuboid(hx: f64, hy: f64, hz: f64) -> Self {
        Shape::Box {
            half_extents: [hx, hy, hz],
        }
    }

    pub fn cylinder(radius: f64, half_length: f64) -> Self {
        Shape::Cylinder {
            radius,
            half_length,
        }
    }

    pub fn dimensions(&self) -> Vec<f64> {
        match *self {
            Shape::Sphere { radius } => vec![radius],
            Shape::Capsule {
                radius,
                half_length,
            }
            | Shape::Cylinder {
                radius,
                half_length,
            } => vec![radius, half_length],
            Shape::Box { half_extents } => half_extents.to_vec(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.dimensions().iter().all(|d| d.is_finite() && *d > 0.0)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Shape::Sphere { .. } => "sphere",
            Shape::Capsule { .. } => "capsule",
            Shape::Box { .. } => "box",
            Shape::Cylinder { .. } => "cylinder",
        }
    }

    /// Support point in the local frame for direction `d` (need not be unit).
    pub fn local_support(&self, d: &Vector3<f64>) -> Vector3<f64> {
        let core = self.core_support(d);
        let margin = self.margin();
        if margin > 0.0 {
            let n = d.norm();
            if n > 0.0 {
                return core + d * (margin / n);
            }
        }
        core
    }

    /// Support of the shape with its rounding margin removed: a point for a
    /// sphere, a segment for a capsule, the full solid otherwise.
    pub(crate) fn core_support(&self, d: &Vector3<f64>) -> Vector3<f64> {
        match *self {
            Shape::Sphere { .. } => Vector3::zeros(),
            Shape::Capsule { half_length, .. } => {
                Vector3::new(0.0, 0.0, if d.z >= 0.0 { half_length } else { -half_length })
            }
            Shape::Box { half_extents: h } => Vector3::new(
                if d.x >= 0.0 { h[0] } else { -h[0] },
                if d.y >= 0.0 { h[1] } else { -h[1] },
                if d.z >= 0.0 { h[2] } else { -h[2] },
            ),
            Shape::Cylinder {
                radius,
                half_length,
            } => {
                let r = (d.x * d.x + d.y * d.y).sqrt();
                let z = if d.z >= 0.0 { half_length } else { -half_length };
                if r > 0.0 {
                    Vector3::new(d.x * radius / r, d.y * radius / r, z)
                } else {
                    Vector3::new(0.0, 0.0, z)
                }
            }
        }
    }

    pub(crate) fn margin(&self) -> f64 {
        match *self {
            Shape::Sphere { radius } | Shape::Capsule { radius, .. } => radius,
            _ => 0.0,
        }
    }

    /// Point-in-solid test in the local frame (boundary counts as inside).
    pub fn contains_local(&self, p: &Vector3<f64>) -> bool {
        match *self {
            Shape::Sphere { radius } => p.norm_squared() <= radius * radius,
            Shape::Capsule {
                radius,
                half_length,
            } => {
                let z = p.z.clamp(-half_length, half_length);
                (p - Vector3::new(0.0, 0.0, z)).norm_squared() <= radius * radius
            }
            Shape::Box { half_extents: h } => {
                p.x.abs() <= h[0] && p.y.abs() <= h[1] && p.z.abs() <= h[2]
            }
            Shape::Cylinder {
                radius,
                half_length,
            } => p.z.abs() <= half_length && p.x * p.x + p.y * p.y <= radius * radius,
        }
    }

    /// Local-frame half extents of the shape's axis-aligned bounding box.
    pub fn local_half_extents(&self) -> Vector3<f64> {
        match *self {
            Shape::Sphere { radius } => Vector3::repeat(radius),
            Shape::Capsule {
                radius,
                half_length,
            } => Vector3::new(radius, radius, half_length + radius),
            Shape::Box { half_extents } => Vector3::from(half_extents),
            Shape::Cylinder {
                radius,
                half_length,
            } => Vector3::new(radius, radius, half_length),
        }
    }

    pub fn aabb(&self, pose: &Pose) -> Aabb {
        let h = self.local_half_extents();
        let r = pose.rotation.abs();
        let world_half = r * h;
        Aabb {
            min: pose.translation - world_half,
            max: pose.translation + world_half,
        }
    }
}

/// World-frame axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }

    pub fn merge(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn intersection(&self, other: &Aabb) -> Option<Aabb> {
        let min = self.min.sup(&other.min);
        let max = self.max.inf(&other.max);
        (0..3).all(|i| min[i] <= max[i]).then_some(Aabb { min, max })
    }
}
