//! Expanding-polytope penetration depth, seeded from a GJK simplex.

use nalgebra::Vector3;

use super::gjk::SupportPoint;

const MAX_ITERATIONS: usize = 128;
/// Relative gap between the polytope bound and the support bound at which
/// the depth is accepted; well under the 1e-3 relative cap.
const RELATIVE_TOLERANCE: f64 = 1e-7;
const ABSOLUTE_TOLERANCE: f64 = 1e-10;
const VISIBILITY_TOLERANCE: f64 = 1e-12;
const MAX_FACES: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct Penetration {
    pub depth: f64,
    /// Unit direction in which `A - B` must be translated (negated) to separate.
    pub normal: Vector3<f64>,
    pub point_a: Vector3<f64>,
    pub point_b: Vector3<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Face {
    v: [usize; 3],
    normal: Vector3<f64>,
    dist: f64,
}

/// Builds the face with its normal pointing away from `interior`.
fn make_face(verts: &[SupportPoint], v: [usize; 3], interior: &Vector3<f64>) -> Option<Face> {
    let (a, b, c) = (verts[v[0]].w, verts[v[1]].w, verts[v[2]].w);
    let mut n = (b - a).cross(&(c - a));
    let len = n.norm();
    if !(len > 1e-300) {
        return None;
    }
    n /= len;
    let mut v = v;
    if n.dot(&(a - interior)) < 0.0 {
        n = -n;
        v.swap(1, 2);
    }
    Some(Face {
        v,
        normal: n,
        dist: n.dot(&a),
    })
}

pub(crate) fn perpendicular(d: &Vector3<f64>) -> Vector3<f64> {
    let axis = if d.x.abs() <= d.y.abs() && d.x.abs() <= d.z.abs() {
        Vector3::x()
    } else if d.y.abs() <= d.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    d.cross(&axis).normalize()
}

/// Grows a GJK simplex containing the origin into a full tetrahedron.
fn seed_tetrahedron<F>(support: &F, mut simplex: Vec<SupportPoint>) -> Option<Vec<SupportPoint>>
where
    F: Fn(&Vector3<f64>) -> SupportPoint,
{
    const EPS: f64 = 1e-12;
    if simplex.is_empty() {
        simplex.push(support(&Vector3::x()));
    }
    if simplex.len() == 1 {
        let dirs = [
            Vector3::x(),
            -Vector3::x(),
            Vector3::y(),
            -Vector3::y(),
            Vector3::z(),
            -Vector3::z(),
        ];
        let p0 = simplex[0].w;
        let next = dirs
            .iter()
            .map(&support)
            .find(|s| (s.w - p0).norm() > EPS)?;
        simplex.push(next);
    }
    if simplex.len() == 2 {
        let d = simplex[1].w - simplex[0].w;
        let u = perpendicular(&d);
        let axis = d.normalize();
        let mut found = None;
        for k in 0..6 {
            let angle = k as f64 * std::f64::consts::PI / 3.0;
            let dir = crate::math::rotation_about(&axis, angle) * u;
            let s = support(&dir);
            let off = (s.w - simplex[0].w).cross(&axis).norm();
            if off > EPS {
                found = Some(s);
                break;
            }
        }
        simplex.push(found?);
    }
    if simplex.len() == 3 {
        let n = (simplex[1].w - simplex[0].w).cross(&(simplex[2].w - simplex[0].w));
        let s = support(&n);
        if n.dot(&(s.w - simplex[0].w)).abs() > EPS * n.norm() {
            simplex.push(s);
        } else {
            let s = support(&-n);
            if n.dot(&(s.w - simplex[0].w)).abs() > EPS * n.norm() {
                simplex.push(s);
            } else {
                return None;
            }
        }
    }
    Some(simplex)
}

/// Penetration depth of `A - B` (which must contain the origin). Returns
/// `None` only when the Minkowski difference is degenerate (flat).
pub fn epa<F>(support: F, simplex: Vec<SupportPoint>) -> Option<Penetration>
where
    F: Fn(&Vector3<f64>) -> SupportPoint,
{
    let mut verts = seed_tetrahedron(&support, simplex)?;
    let interior = verts.iter().fold(Vector3::zeros(), |acc, s| acc + s.w) / 4.0;
    let mut faces: Vec<Face> = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
        .iter()
        .filter_map(|&v| make_face(&verts, v, &interior))
        .collect();
    if faces.len() != 4 {
        return None;
    }

    let mut best = faces[0];
    for _ in 0..MAX_ITERATIONS {
        best = *faces
            .iter()
            .min_by(|a, b| a.dist.total_cmp(&b.dist))
            .expect("polytope has faces");
        let s = support(&best.normal);
        let bound = best.normal.dot(&s.w);
        if bound - best.dist <= ABSOLUTE_TOLERANCE + RELATIVE_TOLERANCE * best.dist.abs() {
            break;
        }
        // Curved or flat-capped shapes return nearly repeated support points;
        // a face-visibility test without slack then breaks the horizon.
        let scale = verts.iter().fold(s.w.norm(), |m, v| m.max(v.w.norm()));
        let slack = VISIBILITY_TOLERANCE * scale.max(1.0);
        if verts.iter().any(|v| (v.w - s.w).norm() <= slack) || faces.len() > MAX_FACES {
            break;
        }
        let new_idx = verts.len();
        verts.push(s);

        // remove faces that see the new point, keep the horizon edges
        let mut edges: Vec<(usize, usize)> = Vec::new();
        faces.retain(|f| {
            let visible = f.normal.dot(&(s.w - verts[f.v[0]].w)) > slack;
            if visible {
                for (a, b) in [(f.v[0], f.v[1]), (f.v[1], f.v[2]), (f.v[2], f.v[0])] {
                    if let Some(pos) = edges.iter().position(|&(x, y)| x == b && y == a) {
                        edges.swap_remove(pos);
                    } else {
                        edges.push((a, b));
                    }
                }
            }
            !visible
        });
        for (a, b) in edges {
            if let Some(f) = make_face(&verts, [a, b, new_idx], &interior) {
                faces.push(f);
            }
        }
        if faces.is_empty() {
            return None;
        }
    }

    // barycentric coordinates of the origin's projection on the best face
    let p = best.normal * best.dist;
    let [i, j, k] = best.v;
    let (a, b, c) = (verts[i].w, verts[j].w, verts[k].w);
    let v0 = b - a;
    let v1 = c - a;
    let v2 = p - a;
    let d00 = v0.dot(&v0);
    let d01 = v0.dot(&v1);
    let d11 = v1.dot(&v1);
    let d20 = v2.dot(&v0);
    let d21 = v2.dot(&v1);
    let denom = d00 * d11 - d01 * d01;
    let (l1, l2) = if denom.abs() > 0.0 {
        ((d11 * d20 - d01 * d21) / denom, (d00 * d21 - d01 * d20) / denom)
    } else {
        (0.0, 0.0)
    };
    let l0 = 1.0 - l1 - l2;
    let point_a = verts[i].a * l0 + verts[j].a * l1 + verts[k].a * l2;
    let point_b = verts[i].b * l0 + verts[j].b * l1 + verts[k].b * l2;
    Some(Penetration {
        depth: best.dist.max(0.0),
        normal: best.normal,
        point_a,
        point_b,
    })
}
