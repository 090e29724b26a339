//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

pub mod script;

use std::f64::consts::PI;
use std::fmt::Write as _;

use kinesim::collision::Shape;
use kinesim::kinematics::chain_fk;
use kinesim::math::Pose;
use kinesim::urdf::KinematicChain;
use nalgebra::{DMatrix, Matrix3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_rotation(rng: &mut impl Rng) -> Matrix3<f64> {
    let axis = Unit::new_normalize(random_unit(rng));
    *Rotation3::from_axis_angle(&axis, rng.random_range(-PI..PI)).matrix()
}

pub fn random_shape(rng: &mut impl Rng) -> Shape {
    match rng.random_range(0..4) {
        0 => Shape::sphere(rng.random_range(0.05..0.5)),
        1 => Shape::capsule(rng.random_range(0.05..0.3), rng.random_range(0.05..0.5)),
        2 => Shape::cuboid(
            rng.random_range(0.05..0.5),
            rng.random_range(0.05..0.5),
            rng.random_range(0.05..0.5),
        ),
        _ => Shape::cylinder(rng.random_range(0.05..0.4), rng.random_range(0.05..0.5)),
    }
}

pub fn random_pose(rng: &mut impl Rng, spread: f64) -> Pose {
    Pose::new(
        random_rotation(rng),
        Vector3::new(
            rng.random_range(-spread..spread),
            rng.random_range(-spread..spread),
            rng.random_range(-spread..spread),
        ),
    )
}

/// Exact signed distance from world point `p` to a posed shape.
pub fn sdf(shape: &Shape, pose: &Pose, p: &Vector3<f64>) -> f64 {
    let l = pose.rotation.transpose() * (p - pose.translation);
    match *shape {
        Shape::Sphere { radius } => l.norm() - radius,
        Shape::Capsule { radius, half_length } => {
            let z = l.z.clamp(-half_length, half_length);
            (l - Vector3::new(0.0, 0.0, z)).norm() - radius
        }
        Shape::Box { half_extents: h } => {
            let q = Vector3::new(l.x.abs() - h[0], l.y.abs() - h[1], l.z.abs() - h[2]);
            let outside = Vector3::new(q.x.max(0.0), q.y.max(0.0), q.z.max(0.0)).norm();
            outside + q.x.max(q.y).max(q.z).min(0.0)
        }
        Shape::Cylinder { radius, half_length } => {
            let dr = l.x.hypot(l.y) - radius;
            let dz = l.z.abs() - half_length;
            dr.max(dz).min(0.0) + dr.max(0.0).hypot(dz.max(0.0))
        }
    }
}

/// Outcome of the grid-sampling overlap oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlap {
    Yes,
    No,
    Ambiguous,
}

/// Dense grid sampling over the bounding-box intersection. A grid point in
/// both solids proves overlap; no grid point within `delta` of both (with
/// `delta` covering the grid's covering radius) proves separation.
pub fn sampled_overlap(a: &Shape, pa: &Pose, b: &Shape, pb: &Pose, per_axis: usize) -> Overlap {
    let ba = a.aabb(pa);
    let bb = b.aabb(pb);
    let lo = ba.min.sup(&bb.min);
    let hi = ba.max.inf(&bb.max);
    let ext = hi - lo;
    let h = ext.max() / per_axis as f64;
    let delta = h * 3f64.sqrt() / 2.0 * 1.01;
    let lo = lo - Vector3::repeat(delta);
    let n = [0, 1, 2].map(|i| ((ext[i] + 2.0 * delta) / h).ceil() as usize + 1);
    if ext.iter().any(|&e| e < -2.0 * delta) {
        return Overlap::No;
    }
    let mut near = false;
    for i in 0..n[0] {
        for j in 0..n[1] {
            for k in 0..n[2] {
                let p = lo + Vector3::new(i as f64 * h, j as f64 * h, k as f64 * h);
                let da = sdf(a, pa, &p);
                let db = sdf(b, pb, &p);
                if da <= 0.0 && db <= 0.0 {
                    return Overlap::Yes;
                }
                if da <= delta && db <= delta {
                    near = true;
                }
            }
        }
    }
    if near {
        Overlap::Ambiguous
    } else {
        Overlap::No
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if a == 0.0 || disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
}

fn sphere_hits(c: &Vector3<f64>, r: f64, o: &Vector3<f64>, d: &Vector3<f64>) -> Vec<f64> {
    let m = o - c;
    quadratic_roots(d.dot(d), 2.0 * m.dot(d), m.dot(&m) - r * r)
}

/// Side-surface hits of a finite cylinder (world-frame formulation).
fn side_hits(c: &Vector3<f64>, axis: &Vector3<f64>, r: f64, hl: f64, o: &Vector3<f64>, d: &Vector3<f64>) -> Vec<f64> {
    let m = o - c;
    let dp = d - axis * d.dot(axis);
    let mp = m - axis * m.dot(axis);
    quadratic_roots(dp.dot(&dp), 2.0 * dp.dot(&mp), mp.dot(&mp) - r * r)
        .into_iter()
        .filter(|t| (m + d * *t).dot(axis).abs() <= hl + 1e-12)
        .collect()
}

/// First ray/surface parameter for a ray starting outside the solid,
/// computed face by face in world coordinates.
pub fn ray_oracle(shape: &Shape, pose: &Pose, o: &Vector3<f64>, d: &Vector3<f64>) -> Option<f64> {
    let c = pose.translation;
    let axes = [0, 1, 2].map(|i| pose.rotation.column(i).into_owned());
    let mut ts: Vec<f64> = Vec::new();
    match *shape {
        Shape::Sphere { radius } => ts = sphere_hits(&c, radius, o, d),
        Shape::Box { half_extents: h } => {
            for i in 0..3 {
                for sign in [-1.0, 1.0] {
                    let n = axes[i] * sign;
                    let denom = n.dot(d);
                    if denom == 0.0 {
                        continue;
                    }
                    let t = (n.dot(&c) + h[i] - n.dot(o)) / denom;
                    let p = o + d * t - c;
                    let inside = (0..3).filter(|&j| j != i).all(|j| p.dot(&axes[j]).abs() <= h[j] + 1e-12);
                    if inside {
                        ts.push(t);
                    }
                }
            }
        }
        Shape::Cylinder { radius, half_length } => {
            ts = side_hits(&c, &axes[2], radius, half_length, o, d);
            for sign in [-1.0, 1.0] {
                let cap = c + axes[2] * (sign * half_length);
                let denom = axes[2].dot(d);
                if denom != 0.0 {
                    let t = axes[2].dot(&(cap - o)) / denom;
                    let p = o + d * t - cap;
                    if p.norm_squared() <= radius * radius + 1e-12 {
                        ts.push(t);
                    }
                }
            }
        }
        Shape::Capsule { radius, half_length } => {
            ts = side_hits(&c, &axes[2], radius, half_length, o, d);
            for sign in [-1.0, 1.0] {
                ts.extend(sphere_hits(&(c + axes[2] * (sign * half_length)), radius, o, d));
            }
        }
    }
    ts.into_iter().filter(|t| *t >= 0.0).min_by(f64::total_cmp)
}

/// Central-difference Jacobian of `chain_fk` (rows: linear, then angular).
pub fn finite_difference_jacobian(chain: &KinematicChain, q: &[f64], h: f64) -> DMatrix<f64> {
    let n = q.len();
    let mut j = DMatrix::zeros(6, n);
    for i in 0..n {
        let mut qp = q.to_vec();
        let mut qm = q.to_vec();
        qp[i] += h;
        qm[i] -= h;
        let tp = chain_fk(chain, &qp).unwrap();
        let tm = chain_fk(chain, &qm).unwrap();
        let lin = (tp.translation - tm.translation) / (2.0 * h);
        let m = tp.rotation * tm.rotation.transpose();
        let w = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) / 2.0;
        let ang = w / (2.0 * h);
        for r in 0..3 {
            j[(r, i)] = lin[r];
            j[(r + 3, i)] = ang[r];
        }
    }
    j
}

/// Classical RK4 for the planar kinematics of a constant body twist, with
/// step size at most `h`.
pub fn rk4_base(x0: [f64; 3], v: [f64; 3], t: f64, h: f64) -> [f64; 3] {
    let f = |s: [f64; 3]| {
        let (sin, cos) = s[2].sin_cos();
        [cos * v[0] - sin * v[1], sin * v[0] + cos * v[1], v[2]]
    };
    let add = |s: [f64; 3], k: [f64; 3], a: f64| [s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]];
    // Equal steps no longer than `h` that land exactly on `t`.
    let steps = (t / h).ceil().max(1.0) as u64;
    let h = t / steps as f64;
    let mut s = x0;
    for _ in 0..steps {
        let k1 = f(s);
        let k2 = f(add(s, k1, h / 2.0));
        let k3 = f(add(s, k2, h / 2.0));
        let k4 = f(add(s, k3, h));
        for i in 0..3 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    s
}

pub fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// A thin box whose near face lies `distance` ahead of `frame` along the
/// frame's `forward` axis, perpendicular to it.
pub fn wall_ahead(frame: &Pose, forward: usize, distance: f64) -> (Shape, Pose) {
    let half_thickness = 0.05;
    let mut rot = frame.rotation;
    // Put the wall's thin (local z) axis along `forward`.
    if forward != 2 {
        let f = frame.rotation.column(forward).into_owned();
        let a = frame.rotation.column((forward + 1) % 3).into_owned();
        rot = Matrix3::from_columns(&[a, f.cross(&a), f]);
    }
    let axis = rot.column(2).into_owned();
    let center = frame.translation + axis * (distance + half_thickness);
    (Shape::cuboid(20.0, 20.0, half_thickness), Pose::new(rot, center))
}

/// Random tree-shaped URDF document with `n_links` links.
pub fn random_urdf(rng: &mut impl Rng, n_links: usize) -> String {
    let f = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
    let mut s = String::from("<robot name=\"random\">\n");
    for i in 0..n_links {
        let _ = writeln!(s, "  <link name=\"l{i}\">");
        if rng.random_bool(0.6) {
            let m = f(rng, 0.1, 5.0);
            let (a, b, c) = (f(rng, 0.01, 1.0), f(rng, 0.01, 1.0), f(rng, 0.01, 1.0));
            let _ = writeln!(
                s,
                "    <inertial><origin xyz=\"{} 0 {}\" rpy=\"0 {} 0\"/><mass value=\"{m}\"/>\
                 <inertia ixx=\"{a}\" ixy=\"0.001\" ixz=\"0\" iyy=\"{b}\" iyz=\"0\" izz=\"{c}\"/></inertial>",
                f(rng, -0.1, 0.1),
                f(rng, -0.1, 0.1),
                f(rng, -1.0, 1.0)
            );
        }
        if rng.random_bool(0.7) {
            let geom = match rng.random_range(0..4) {
                0 => format!("<sphere radius=\"{}\"/>", f(rng, 0.01, 0.2)),
                1 => format!("<box size=\"{} {} {}\"/>", f(rng, 0.01, 0.3), f(rng, 0.01, 0.3), f(rng, 0.01, 0.3)),
                2 => format!("<cylinder radius=\"{}\" length=\"{}\"/>", f(rng, 0.01, 0.2), f(rng, 0.02, 0.5)),
                _ => format!("<capsule radius=\"{}\" length=\"{}\"/>", f(rng, 0.01, 0.2), f(rng, 0.02, 0.5)),
            };
            let _ = writeln!(
                s,
                "    <collision><origin xyz=\"{} {} {}\" rpy=\"{} {} {}\"/><geometry>{geom}</geometry></collision>",
                f(rng, -0.2, 0.2),
                f(rng, -0.2, 0.2),
                f(rng, -0.2, 0.2),
                f(rng, -3.0, 3.0),
                f(rng, -1.5, 1.5),
                f(rng, -3.0, 3.0)
            );
        }
        s.push_str("  </link>\n");
    }
    for i in 1..n_links {
        let parent = rng.random_range(0..i);
        let kind = ["revolute", "continuous", "prismatic", "fixed"][rng.random_range(0..4)];
        let axis = random_unit(rng);
        let _ = write!(
            s,
            "  <joint name=\"j{i}\" type=\"{kind}\"><parent link=\"l{parent}\"/><child link=\"l{i}\"/>\
             <origin xyz=\"{} {} {}\" rpy=\"{} {} {}\"/><axis xyz=\"{} {} {}\"/>",
            f(rng, -0.5, 0.5),
            f(rng, -0.5, 0.5),
            f(rng, -0.5, 0.5),
            f(rng, -3.0, 3.0),
            f(rng, -1.5, 1.5),
            f(rng, -3.0, 3.0),
            axis.x,
            axis.y,
            axis.z
        );
        match kind {
            "revolute" | "prismatic" => {
                let lo = f(rng, -2.0, 0.0);
                let hi = f(rng, 0.0, 2.0);
                let _ = write!(s, "<limit lower=\"{lo}\" upper=\"{hi}\" velocity=\"{}\" effort=\"10\"/>", f(rng, 0.5, 3.0));
            }
            "continuous" => {
                let _ = write!(s, "<limit velocity=\"{}\" effort=\"10\"/>", f(rng, 0.5, 3.0));
            }
            _ => {}
        }
        s.push_str("</joint>\n");
    }
    s.push_str("</robot>\n");
    s
}
