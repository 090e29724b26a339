use std::path::Path;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::math::Pose;
use crate::sim::{Instance, SimError};

fn default_hfov() -> f64 {
    58f64.to_radians()
}

fn default_near() -> f64 {
    0.3
}

fn default_far() -> f64 {
    8.0
}

/// Depth camera mount. The mount frame is an optical frame: z forward,
/// x right, y down in the image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraSpec {
    pub id: String,
    pub link: String,
    #[serde(default)]
    pub xyz: [f64; 3],
    #[serde(default)]
    pub rpy: [f64; 3],
    #[serde(default = "default_hfov")]
    pub hfov: f64,
    #[serde(default = "default_near")]
    pub near: f64,
    #[serde(default = "default_far")]
    pub far: f64,
}

impl CameraSpec {
    pub fn mount(&self) -> Pose {
        Pose::from_xyz_rpy(self.xyz, self.rpy)
    }

    pub fn intrinsics(&self, resolution: Resolution) -> Intrinsics {
        let (w, h) = resolution.dims();
        let fx = (w as f64 / 2.0) / (self.hfov / 2.0).tan();
        Intrinsics {
            fx,
            fy: fx,
            cx: w as f64 / 2.0,
            cy: h as f64 / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    #[serde(rename = "160x120")]
    Qqvga,
    #[serde(rename = "320x240")]
    Qvga,
    #[serde(rename = "640x480")]
    Vga,
}

impl Resolution {
    pub const ALL: [Resolution; 3] = [Resolution::Qqvga, Resolution::Qvga, Resolution::Vga];

    pub fn from_dims(width: u32, height: u32) -> Result<Self, SimError> {
        Self::ALL
            .into_iter()
            .find(|r| r.dims() == (width, height))
            .ok_or(SimError::UnsupportedResolution(width, height))
    }

    pub fn dims(&self) -> (u32, u32) {
        match self {
            Resolution::Qqvga => (160, 120),
            Resolution::Qvga => (320, 240),
            Resolution::Vga => (640, 480),
        }
    }
}

/// Pinhole intrinsics in pixels. Pixel `(u, v)` looks along
/// `((u − cx)/fx, (v − cy)/fy, 1)` in the optical frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Intrinsics {
    pub fn pixel_direction(&self, u: u32, v: u32) -> Vector3<f64> {
        Vector3::new(
            (u as f64 - self.cx) / self.fx,
            (v as f64 - self.cy) / self.fy,
            1.0,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthImage {
    pub camera: String,
    pub frame: String,
    pub width: u32,
    pub height: u32,
    pub intrinsics: Intrinsics,
    pub near: f64,
    pub far: f64,
    pub timestamp: f64,
    /// Row-major z-depth in meters; `+inf` where nothing lies within
    /// [near, far] (`null` in JSON, 0 in PGM).
    #[serde(serialize_with = "super::ser_ranges", deserialize_with = "super::de_ranges")]
    pub depth: Vec<f64>,
}

#[derive(Serialize)]
struct PgmHeader<'a> {
    camera: &'a str,
    frame: &'a str,
    width: u32,
    height: u32,
    intrinsics: Intrinsics,
    near: f64,
    far: f64,
    timestamp: f64,
    units: &'static str,
    invalid_value: u16,
}

impl DepthImage {
    pub fn at(&self, u: u32, v: u32) -> f64 {
        self.depth[(v * self.width + u) as usize]
    }

    /// Binary 16-bit PGM in millimeters, big-endian; no-return pixels are 0.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n65535\n", self.width, self.height).into_bytes();
        out.reserve(self.depth.len() * 2);
        for &d in &self.depth {
            let mm = if d.is_finite() {
                (d * 1000.0).round().clamp(1.0, 65535.0) as u16
            } else {
                0
            };
            out.extend_from_slice(&mm.to_be_bytes());
        }
        out
    }

    /// JSON header for the PGM: everything but the pixel array.
    pub fn header_json(&self) -> String {
        let h = PgmHeader {
            camera: &self.camera,
            frame: &self.frame,
            width: self.width,
            height: self.height,
            intrinsics: self.intrinsics,
            near: self.near,
            far: self.far,
            timestamp: self.timestamp,
            units: "mm",
            invalid_value: 0,
        };
        serde_json::to_string_pretty(&h).expect("header serializes")
    }

    /// Writes `path` (PGM) and the header next to it with a `.json` extension.
    pub fn write_pgm(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_pgm())?;
        std::fs::write(path.with_extension("json"), self.header_json())
    }
}

pub fn get_depth_image(
    instance: &Instance,
    robot: u64,
    camera_id: &str,
    resolution: Resolution,
) -> Result<DepthImage, SimError> {
    let state = instance.robot(robot)?;
    let spec = state
        .asset()
        .camera(camera_id)
        .ok_or_else(|| SimError::UnknownCamera(camera_id.to_string()))?;
    let link = state
        .link_pose(&spec.link)
        .ok_or_else(|| SimError::UnknownLink(spec.link.clone()))?;
    let frame = link.compose(&spec.mount());
    let k = spec.intrinsics(resolution);
    let (w, h) = resolution.dims();
    let world = instance.world();
    let (near, far) = (spec.near, spec.far);

    let rows: Result<Vec<Vec<f64>>, SimError> = (0..h)
        .into_par_iter()
        .map(|v| {
            let mut row = Vec::with_capacity(w as usize);
            for u in 0..w {
                let d = k.pixel_direction(u, v);
                let n = d.norm();
                let dir = frame.transform_vector(&d);
                let hit = world.ray_cast_filtered(&frame.translation, &dir, far * n, |b| {
                    b.robot() == Some(robot)
                })?;
                let z = hit.map_or(f64::INFINITY, |hit| hit.distance / n);
                row.push(if (near..=far).contains(&z) { z } else { f64::INFINITY });
            }
            Ok(row)
        })
        .collect();

    Ok(DepthImage {
        camera: spec.id.clone(),
        frame: spec.link.clone(),
        width: w,
        height: h,
        intrinsics: k,
        near,
        far,
        timestamp: instance.clock(),
        depth: rows?.concat(),
    })
}
