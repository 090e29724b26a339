//! Analytic ray/primitive intersections. Rays that start inside a solid hit
//! it at distance zero.

use nalgebra::Vector3;

use super::Shape;
use crate::math::Pose;

/// Entry parameter of a unit-direction ray into a shape, if any (`t >= 0`).
pub fn ray_shape(shape: &Shape, pose: &Pose, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
    let rt = pose.rotation.transpose();
    let o = rt * (origin - pose.translation);
    let d = rt * dir;
    match *shape {
        Shape::Sphere { radius } => ray_sphere(&o, &d, &Vector3::zeros(), radius),
        Shape::Box { half_extents } => ray_box(&o, &d, &half_extents),
        Shape::Capsule {
            radius,
            half_length,
        } => ray_capsule(&o, &d, radius, half_length),
        Shape::Cylinder {
            radius,
            half_length,
        } => ray_cylinder(&o, &d, radius, half_length),
    }
}

fn ray_sphere(o: &Vector3<f64>, d: &Vector3<f64>, center: &Vector3<f64>, r: f64) -> Option<f64> {
    let m = o - center;
    let c = m.norm_squared() - r * r;
    if c <= 0.0 {
        return Some(0.0);
    }
    let b = m.dot(d);
    if b > 0.0 {
        return None;
    }
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    Some((-b - disc.sqrt()).max(0.0))
}

fn ray_box(o: &Vector3<f64>, d: &Vector3<f64>, h: &[f64; 3]) -> Option<f64> {
    let mut tmin = 0.0f64;
    let mut tmax = f64::INFINITY;
    for i in 0..3 {
        if d[i] == 0.0 {
            if o[i].abs() > h[i] {
                return None;
            }
        } else {
            let inv = 1.0 / d[i];
            let mut t1 = (-h[i] - o[i]) * inv;
            let mut t2 = (h[i] - o[i]) * inv;
            if t1 > t2 {
                std::mem::swap(&mut t1, &mut t2);
            }
            tmin = tmin.max(t1);
            tmax = tmax.min(t2);
            if tmin > tmax {
                return None;
            }
        }
    }
    Some(tmin)
}

/// Side-surface entry of the infinite z-aligned cylinder, restricted to |z| <= h.
fn ray_cylinder_side(o: &Vector3<f64>, d: &Vector3<f64>, r: f64, h: f64) -> Option<f64> {
    let a = d.x * d.x + d.y * d.y;
    if a == 0.0 {
        return None;
    }
    let b = o.x * d.x + o.y * d.y;
    let c = o.x * o.x + o.y * o.y - r * r;
    let disc = b * b - a * c;
    if disc < 0.0 {
        return None;
    }
    let t = (-b - disc.sqrt()) / a;
    (t >= 0.0 && (o.z + t * d.z).abs() <= h).then_some(t)
}

fn ray_capsule(o: &Vector3<f64>, d: &Vector3<f64>, r: f64, h: f64) -> Option<f64> {
    let z = o.z.clamp(-h, h);
    if (o - Vector3::new(0.0, 0.0, z)).norm_squared() <= r * r {
        return Some(0.0);
    }
    [
        ray_cylinder_side(o, d, r, h),
        ray_sphere(o, d, &Vector3::new(0.0, 0.0, h), r),
        ray_sphere(o, d, &Vector3::new(0.0, 0.0, -h), r),
    ]
    .into_iter()
    .flatten()
    .min_by(f64::total_cmp)
}

fn ray_cylinder(o: &Vector3<f64>, d: &Vector3<f64>, r: f64, h: f64) -> Option<f64> {
    if o.z.abs() <= h && o.x * o.x + o.y * o.y <= r * r {
        return Some(0.0);
    }
    let mut best = ray_cylinder_side(o, d, r, h);
    if d.z != 0.0 {
        for cap in [h, -h] {
            let t = (cap - o.z) / d.z;
            if t >= 0.0 {
                let x = o.x + t * d.x;
                let y = o.y + t * d.y;
                if x * x + y * y <= r * r && best.is_none_or(|b| t < b) {
                    best = Some(t);
                }
            }
        }
    }
    best
}

/// Intersection with the ground plane z = 0.
pub fn ray_ground(origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
    if origin.z == 0.0 {
        return Some(0.0);
    }
    if dir.z == 0.0 {
        return None;
    }
    let t = -origin.z / dir.z;
    (t >= 0.0).then_some(t)
}
