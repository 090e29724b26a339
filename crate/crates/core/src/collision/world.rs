use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::ray::{ray_ground, ray_shape};
use super::{pair_distance, Aabb, CollisionError, ContactResult, Shape};
use crate::math::Pose;

/// Identity of a collision body inside a world snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodyId {
    Ground,
    Static { id: u64 },
    Link { robot: u64, link: String },
}

impl BodyId {
    pub fn robot(&self) -> Option<u64> {
        match self {
            BodyId::Link { robot, .. } => Some(*robot),
            _ => None,
        }
    }
}

impl fmt::Display for BodyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyId::Ground => write!(f, "ground"),
            BodyId::Static { id } => write!(f, "static#{id}"),
            BodyId::Link { robot, link } => write!(f, "robot#{robot}/{link}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Body {
    pub id: BodyId,
    pub shape: Shape,
    pub pose: Pose,
}

impl Body {
    pub fn aabb(&self) -> Aabb {
        self.shape.aabb(&self.pose)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayHit {
    pub distance: f64,
    pub hit_point: [f64; 3],
    /// `None` for the ground plane.
    #[serde(skip)]
    pub body: Option<usize>,
}

/// A frozen set of posed bodies plus the optional ground plane at z = 0.
#[derive(Debug, Clone, Default)]
pub struct World {
    pub bodies: Vec<Body>,
    pub ground_plane: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub a: BodyId,
    pub b: BodyId,
    #[serde(flatten)]
    pub result: ContactResult,
}

impl World {
    pub fn new(ground_plane: bool) -> Self {
        Self {
            bodies: Vec::new(),
            ground_plane,
        }
    }

    pub fn push(&mut self, id: BodyId, shape: Shape, pose: Pose) {
        self.bodies.push(Body { id, shape, pose });
    }

    /// Nearest hit over all bodies (and the ground plane) within `max_range`.
    /// Bodies for which `exclude` returns true are ignored.
    pub fn ray_cast_filtered<F>(
        &self,
        origin: &Vector3<f64>,
        direction: &Vector3<f64>,
        max_range: f64,
        exclude: F,
    ) -> Result<Option<RayHit>, CollisionError>
    where
        F: Fn(&BodyId) -> bool,
    {
        let n = direction.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(CollisionError::ZeroDirection);
        }
        if !(max_range > 0.0) {
            return Err(CollisionError::InvalidRange(max_range));
        }
        let dir = direction / n;

        let mut best: Option<(f64, Option<usize>)> = None;
        if self.ground_plane {
            if let Some(t) = ray_ground(origin, &dir) {
                best = Some((t, None));
            }
        }
        for (i, body) in self.bodies.iter().enumerate() {
            if exclude(&body.id) {
                continue;
            }
            if let Some(t) = ray_shape(&body.shape, &body.pose, origin, &dir) {
                if best.is_none_or(|(b, _)| t < b) {
                    best = Some((t, Some(i)));
                }
            }
        }
        Ok(best.filter(|(t, _)| *t <= max_range).map(|(t, body)| {
            let p = origin + dir * t;
            RayHit {
                distance: t,
                hit_point: [p.x, p.y, p.z],
                body,
            }
        }))
    }

    pub fn ray_cast(
        &self,
        origin: &Vector3<f64>,
        direction: &Vector3<f64>,
        max_range: f64,
    ) -> Result<Option<RayHit>, CollisionError> {
        self.ray_cast_filtered(origin, direction, max_range, |_| false)
    }

    pub fn body_id(&self, hit: &RayHit) -> BodyId {
        hit.body
            .map(|i| self.bodies[i].id.clone())
            .unwrap_or(BodyId::Ground)
    }

    /// Penetrating contacts between bodies selected by `query` and every
    /// body selected by `against`. Ground is not a collision body.
    pub fn contacts<Q, A>(&self, query: Q, against: A, prune: bool) -> Vec<Contact>
    where
        Q: Fn(&BodyId) -> bool,
        A: Fn(&BodyId) -> bool,
    {
        let mut out = Vec::new();
        for a in self.bodies.iter().filter(|b| query(&b.id)) {
            let aabb_a = a.aabb();
            for b in self.bodies.iter().filter(|b| against(&b.id)) {
                if std::ptr::eq(a, b) {
                    continue;
                }
                if prune && !aabb_a.intersects(&b.aabb()) {
                    continue;
                }
                let r = pair_distance(&a.shape, &a.pose, &b.shape, &b.pose);
                if r.is_penetrating() {
                    out.push(Contact {
                        a: a.id.clone(),
                        b: b.id.clone(),
                        result: r,
                    });
                }
            }
        }
        out
    }
}
