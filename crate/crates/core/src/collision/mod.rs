//! Primitive distance queries (closed forms, GJK/EPA), robot self-collision,
//! world contacts and ray casting.

mod distance;
mod epa;
mod gjk;
mod ray;
mod self_collision;
mod shape;
mod world;

use thiserror::Error;

pub use distance::{closest_points_segments, pair_distance, ContactResult};
pub use ray::{ray_ground, ray_shape};
pub use self_collision::{self_collision, SelfCollisionChecker};
pub use shape::{Aabb, Shape};
pub use world::{Body, BodyId, Contact, RayHit, World};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollisionError {
    #[error("ray direction must be non-zero and finite")]
    ZeroDirection,
    #[error("max range must be positive, got {0}")]
    InvalidRange(f64),
}
