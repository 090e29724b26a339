//! Ray-cast laser scans and depth images pinned to robot link frames.
//! Rays never report the emitting robot's own links.

mod depth;
mod laser;

use serde::{Deserialize, Deserializer, Serializer};

pub use depth::{get_depth_image, CameraSpec, DepthImage, Intrinsics, Resolution};
pub use laser::{get_laser_scan, LaserScan, LaserSpec};

/// Serializes `+inf` (miss) as JSON `null`.
pub(crate) fn ser_ranges<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.is_finite().then_some(*x)))
}

pub(crate) fn de_ranges<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    let v: Vec<Option<f64>> = Vec::deserialize(d)?;
    Ok(v.into_iter().map(|x| x.unwrap_or(f64::INFINITY)).collect())
}
