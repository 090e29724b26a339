//! GJK distance between convex sets given by support functions.

use nalgebra::Vector3;

pub const MAX_ITERATIONS: usize = 64;
pub const TOLERANCE: f64 = 1e-9;

/// A vertex of the Minkowski difference together with the two support
/// points it came from (`w = a - b`).
#[derive(Debug, Clone, Copy)]
pub struct SupportPoint {
    pub w: Vector3<f64>,
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
}

#[derive(Debug, Clone)]
pub enum GjkResult {
    Separated {
        distance: f64,
        point_a: Vector3<f64>,
        point_b: Vector3<f64>,
    },
    /// The sets intersect; the final simplex encloses the origin (up to tolerance).
    Intersecting { simplex: Vec<SupportPoint> },
}

/// `support(d)` must return the support point of `A - B` in direction `d`,
/// i.e. `support_A(d) - support_B(-d)`.
pub fn gjk<F>(support: F, initial_dir: Vector3<f64>) -> GjkResult
where
    F: Fn(&Vector3<f64>) -> SupportPoint,
{
    let dir = if initial_dir.norm_squared() > 0.0 {
        initial_dir
    } else {
        Vector3::x()
    };
    let first = support(&dir);
    let mut simplex = vec![first];
    let mut lambdas = vec![1.0];
    let mut v = first.w;

    for _ in 0..MAX_ITERATIONS {
        let vv = v.norm_squared();
        if vv <= TOLERANCE * TOLERANCE {
            return GjkResult::Intersecting { simplex };
        }
        let w = support(&-v);
        // upper bound ‖v‖, lower bound v·w/‖v‖
        let gap = vv - v.dot(&w.w);
        if gap <= TOLERANCE * vv.sqrt() || simplex.iter().any(|s| s.w == w.w) {
            break;
        }
        simplex.push(w);
        let (reduced, lam, closest) = closest_on_simplex(&simplex);
        simplex = reduced;
        lambdas = lam;
        v = closest;
        if simplex.len() == 4 {
            return GjkResult::Intersecting { simplex };
        }
    }

    let distance = v.norm();
    if distance <= TOLERANCE {
        return GjkResult::Intersecting { simplex };
    }
    let mut point_a = Vector3::zeros();
    let mut point_b = Vector3::zeros();
    for (s, l) in simplex.iter().zip(&lambdas) {
        point_a += s.a * *l;
        point_b += s.b * *l;
    }
    GjkResult::Separated {
        distance,
        point_a,
        point_b,
    }
}

type Reduced = (Vec<SupportPoint>, Vec<f64>, Vector3<f64>);

/// Closest point of the simplex hull to the origin, with the minimal
/// sub-simplex that contains it and its barycentric weights.
fn closest_on_simplex(s: &[SupportPoint]) -> Reduced {
    match s.len() {
        1 => (s.to_vec(), vec![1.0], s[0].w),
        2 => closest_on_segment(s[0], s[1]),
        3 => closest_on_triangle(s[0], s[1], s[2]),
        4 => closest_on_tetrahedron(s),
        _ => unreachable!("simplex has at most four vertices"),
    }
}

fn closest_on_segment(a: SupportPoint, b: SupportPoint) -> Reduced {
    let ab = b.w - a.w;
    let denom = ab.norm_squared();
    let t = if denom > 0.0 { (-a.w.dot(&ab) / denom).clamp(0.0, 1.0) } else { 0.0 };
    if t <= 0.0 {
        (vec![a], vec![1.0], a.w)
    } else if t >= 1.0 {
        (vec![b], vec![1.0], b.w)
    } else {
        (vec![a, b], vec![1.0 - t, t], a.w + ab * t)
    }
}

// Voronoi-region walk for the origin against triangle abc.
fn closest_on_triangle(a: SupportPoint, b: SupportPoint, c: SupportPoint) -> Reduced {
    let ab = b.w - a.w;
    let ac = c.w - a.w;
    let ap = -a.w;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (vec![a], vec![1.0], a.w);
    }
    let bp = -b.w;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (vec![b], vec![1.0], b.w);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return (vec![a, b], vec![1.0 - t, t], a.w + ab * t);
    }
    let cp = -c.w;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (vec![c], vec![1.0], c.w);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return (vec![a, c], vec![1.0 - t, t], a.w + ac * t);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (vec![b, c], vec![1.0 - t, t], b.w + (c.w - b.w) * t);
    }
    let sum = va + vb + vc;
    if sum.abs() < f64::MIN_POSITIVE {
        // degenerate triangle: fall back to its edges
        return [closest_on_segment(a, b), closest_on_segment(a, c), closest_on_segment(b, c)]
            .into_iter()
            .min_by(|x, y| x.2.norm_squared().total_cmp(&y.2.norm_squared()))
            .unwrap();
    }
    let denom = 1.0 / sum;
    let v = vb * denom;
    let w = vc * denom;
    (vec![a, b, c], vec![1.0 - v - w, v, w], a.w + ab * v + ac * w)
}

fn closest_on_tetrahedron(s: &[SupportPoint]) -> Reduced {
    let faces = [[0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 3, 1], [1, 2, 3, 0]];
    let volume = (s[1].w - s[0].w)
        .cross(&(s[2].w - s[0].w))
        .dot(&(s[3].w - s[0].w));
    let scale = s
        .iter()
        .map(|p| p.w.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let degenerate = volume.abs() <= 1e-12 * scale * scale * scale;

    let mut best: Option<Reduced> = None;
    let mut inside = !degenerate;
    for [i, j, k, l] in faces {
        let (a, b, c, d) = (s[i].w, s[j].w, s[k].w, s[l].w);
        let n = (b - a).cross(&(c - a));
        let sign_origin = (-a).dot(&n);
        let sign_opposite = (d - a).dot(&n);
        let outside = degenerate || sign_origin * sign_opposite < 0.0;
        if outside {
            inside = false;
            let cand = closest_on_triangle(s[i], s[j], s[k]);
            if best
                .as_ref()
                .is_none_or(|b| cand.2.norm_squared() < b.2.norm_squared())
            {
                best = Some(cand);
            }
        }
    }
    if inside {
        return (s.to_vec(), vec![0.25; 4], Vector3::zeros());
    }
    best.expect("an outside face exists when the origin is not enclosed")
}
