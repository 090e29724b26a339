use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::math::Pose;
use crate::sim::{Instance, SimError};

fn default_rays() -> usize {
    15
}

fn default_fov() -> f64 {
    PI / 3.0
}

fn default_max_range() -> f64 {
    3.0
}

/// Laser mount declared in a model sidecar. The fan lies in the xy-plane of
/// the mount frame (link frame offset by `xyz`, rotated by `yaw` about z).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSpec {
    pub id: String,
    pub link: String,
    #[serde(default)]
    pub xyz: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
    #[serde(default = "default_rays")]
    pub rays: usize,
    #[serde(default = "default_fov")]
    pub fov: f64,
    #[serde(default = "default_max_range")]
    pub max_range: f64,
}

impl LaserSpec {
    /// Evenly spaced fan angles from −fov/2 to +fov/2 inclusive.
    pub fn angles(&self) -> Vec<f64> {
        match self.rays {
            0 => Vec::new(),
            1 => vec![0.0],
            n => (0..n)
                .map(|i| (2 * i) as f64 - (n - 1) as f64)
                .map(|k| k / (n - 1) as f64 * (self.fov / 2.0))
                .collect(),
        }
    }

    pub fn mount(&self) -> Pose {
        Pose::from_xyz_rpy(self.xyz, [0.0, 0.0, self.yaw])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaserScan {
    pub laser: String,
    pub frame: String,
    pub angles: Vec<f64>,
    /// Meters; `+inf` for a miss (`null` in JSON).
    #[serde(serialize_with = "super::ser_ranges", deserialize_with = "super::de_ranges")]
    pub ranges: Vec<f64>,
    pub max_range: f64,
    pub timestamp: f64,
    /// World pose of the scan frame at capture.
    pub origin: Pose,
}

impl LaserScan {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scan serializes")
    }
}

pub fn get_laser_scan(instance: &Instance, robot: u64, laser_id: &str) -> Result<LaserScan, SimError> {
    let state = instance.robot(robot)?;
    let spec = state
        .asset()
        .laser(laser_id)
        .ok_or_else(|| SimError::UnknownLaser(laser_id.to_string()))?;
    let link = state
        .link_pose(&spec.link)
        .ok_or_else(|| SimError::UnknownLink(spec.link.clone()))?;
    let frame = link.compose(&spec.mount());
    let world = instance.world();
    let angles = spec.angles();
    let mut ranges = Vec::with_capacity(angles.len());
    for &a in &angles {
        let dir = frame.transform_vector(&Vector3::new(a.cos(), a.sin(), 0.0));
        let hit = world.ray_cast_filtered(&frame.translation, &dir, spec.max_range, |b| {
            b.robot() == Some(robot)
        })?;
        ranges.push(hit.map_or(f64::INFINITY, |h| h.distance));
    }
    Ok(LaserScan {
        laser: spec.id.clone(),
        frame: spec.link.clone(),
        angles,
        ranges,
        max_range: spec.max_range,
        timestamp: instance.clock(),
        origin: frame,
    })
}
