use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::epa::epa;
use super::gjk::{gjk, GjkResult, SupportPoint};
use super::Shape;
use crate::math::Pose;

/// Signed separation of two shapes. Negative distance is penetration depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactResult {
    pub signed_distance: f64,
    pub closest_point_a: [f64; 3],
    pub closest_point_b: [f64; 3],
}

impl ContactResult {
    fn new(d: f64, a: Vector3<f64>, b: Vector3<f64>) -> Self {
        Self {
            signed_distance: d,
            closest_point_a: [a.x, a.y, a.z],
            closest_point_b: [b.x, b.y, b.z],
        }
    }

    pub fn is_penetrating(&self) -> bool {
        self.signed_distance < 0.0
    }

    pub fn swapped(&self) -> Self {
        Self {
            signed_distance: self.signed_distance,
            closest_point_a: self.closest_point_b,
            closest_point_b: self.closest_point_a,
        }
    }
}

/// Endpoints of the core segment (point when both coincide) of a rounded shape.
fn core_segment(shape: &Shape, pose: &Pose) -> Option<(Vector3<f64>, Vector3<f64>)> {
    match *shape {
        Shape::Sphere { .. } => Some((pose.translation, pose.translation)),
        Shape::Capsule { half_length, .. } => {
            let axis = pose.rotation.column(2) * half_length;
            Some((pose.translation - axis, pose.translation + axis))
        }
        _ => None,
    }
}

/// Closest points between segments `p1q1` and `p2q2` (either may be a point).
pub fn closest_points_segments(
    p1: &Vector3<f64>,
    q1: &Vector3<f64>,
    p2: &Vector3<f64>,
    q2: &Vector3<f64>,
) -> (Vector3<f64>, Vector3<f64>) {
    const EPS: f64 = 1e-300;
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= EPS && e <= EPS {
        return (*p1, *p2);
    }
    if a <= EPS {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= EPS {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (p1 + d1 * s, p2 + d2 * t)
}

fn world_core_support(shape: &Shape, pose: &Pose, d: &Vector3<f64>) -> Vector3<f64> {
    let local_d = pose.rotation.transpose() * d;
    pose.transform_point(&shape.core_support(&local_d))
}

/// Signed distance and closest (or deepest) points between two posed shapes.
///
/// Sphere and capsule pairs use closed forms on their core segments. Pairs
/// involving a box or cylinder run GJK on the margin-free cores, then EPA
/// when the cores themselves overlap; sphere/capsule radii are added back as
/// a uniform margin.
pub fn pair_distance(a: &Shape, pose_a: &Pose, b: &Shape, pose_b: &Pose) -> ContactResult {
    let ra = a.margin();
    let rb = b.margin();

    if let (Some((p1, q1)), Some((p2, q2))) = (core_segment(a, pose_a), core_segment(b, pose_b)) {
        let (ca, cb) = closest_points_segments(&p1, &q1, &p2, &q2);
        let delta = cb - ca;
        let d = delta.norm();
        let n = if d > 0.0 {
            delta / d
        } else {
            // coincident cores: any direction perpendicular to the segments works
            let axis = q1 - p1;
            if axis.norm_squared() > 0.0 {
                super::epa::perpendicular(&axis)
            } else {
                Vector3::z()
            }
        };
        return ContactResult::new(d - ra - rb, ca + n * ra, cb - n * rb);
    }

    let support = |d: &Vector3<f64>| {
        let pa = world_core_support(a, pose_a, d);
        let pb = world_core_support(b, pose_b, &-d);
        SupportPoint { w: pa - pb, a: pa, b: pb }
    };
    match gjk(support, pose_b.translation - pose_a.translation) {
        GjkResult::Separated {
            distance,
            point_a,
            point_b,
        } => {
            let n = (point_b - point_a) / distance;
            ContactResult::new(distance - ra - rb, point_a + n * ra, point_b - n * rb)
        }
        GjkResult::Intersecting { simplex } => match epa(support, simplex) {
            Some(p) => {
                // A must move by -normal*depth; margins deepen the overlap
                let n = -p.normal;
                let depth = if p.depth <= super::gjk::TOLERANCE { 0.0 } else { p.depth };
                ContactResult::new(
                    -(depth + ra + rb),
                    p.point_a - n * ra,
                    p.point_b + n * rb,
                )
            }
            None => {
                // flat Minkowski difference: cores merely touch
                let mid = (pose_a.translation + pose_b.translation) / 2.0;
                ContactResult::new(-(ra + rb), mid, mid)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_pairs() {
        let s = Shape::sphere(0.5);
        let far = pair_distance(
            &s,
            &Pose::identity(),
            &s,
            &Pose::from_translation(Vector3::new(2.0, 0.0, 0.0)),
        );
        assert!((far.signed_distance - 1.0).abs() < 1e-15);
        let near = pair_distance(
            &s,
            &Pose::identity(),
            &s,
            &Pose::from_translation(Vector3::new(0.9, 0.0, 0.0)),
        );
        assert!((near.signed_distance + 0.1).abs() < 1e-15);
    }

    #[test]
    fn box_box_penetration_depth() {
        let b = Shape::cuboid(0.5, 0.5, 0.5);
        let r = pair_distance(
            &b,
            &Pose::identity(),
            &b,
            &Pose::from_translation(Vector3::new(0.8, 0.1, 0.0)),
        );
        assert!((r.signed_distance + 0.2).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn touching_boxes_are_not_penetrating() {
        let b = Shape::cuboid(0.5, 0.5, 0.5);
        let r = pair_distance(
            &b,
            &Pose::identity(),
            &b,
            &Pose::from_translation(Vector3::new(1.0, 0.0, 0.0)),
        );
        assert!(!r.is_penetrating(), "{r:?}");
        assert!(r.signed_distance.abs() < 1e-9);
    }

    #[test]
    fn cylinder_sphere_separation() {
        let c = Shape::cylinder(0.3, 0.5);
        let s = Shape::sphere(0.1);
        let r = pair_distance(
            &c,
            &Pose::identity(),
            &s,
            &Pose::from_translation(Vector3::new(1.0, 0.0, 0.2)),
        );
        assert!((r.signed_distance - 0.6).abs() < 1e-7, "{r:?}");
    }
}
