//! Fixed-timestep simulation instances: robots with speed-limited joint
//! controllers, posture presets and a holonomic base with exact odometry.

mod base;
mod instance;
mod registry;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assets::AssetError;
use crate::collision::CollisionError;
use crate::math::normalize_angle;

pub use base::integrate_twist;
pub use instance::{BaseCommand, Instance, JointCommand, RobotState};
pub use registry::Registry;

pub const DEFAULT_DT: f64 = 1.0 / 240.0;
/// Slack allowed on speed caps and per-step displacement checks.
pub const SPEED_EPS: f64 = 1e-12;
/// Base go-to commands finish once both errors fall below this.
pub const GOTO_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid dt {0}: must be positive and finite")]
    InvalidDt(f64),
    #[error("unknown instance {0}")]
    UnknownInstance(u64),
    #[error("unknown robot {0}")]
    UnknownRobot(u64),
    #[error("unknown joint `{0}`")]
    UnknownJoint(String),
    #[error("unknown link `{0}`")]
    UnknownLink(String),
    #[error("unknown posture `{0}`")]
    UnknownPosture(String),
    #[error("unknown laser `{0}`")]
    UnknownLaser(String),
    #[error("unknown camera `{0}`")]
    UnknownCamera(String),
    #[error("target {target} for `{joint}` outside [{lower}, {upper}]")]
    TargetOutOfLimits {
        joint: String,
        target: f64,
        lower: f64,
        upper: f64,
    },
    #[error("fraction of max speed must be in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("{0} names but {1} targets")]
    LengthMismatch(usize, usize),
    #[error("{what} {value} exceeds cap {cap}")]
    SpeedCapExceeded { what: &'static str, value: f64, cap: f64 },
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("spawn pose penetrates existing bodies: {}", .0.join(", "))]
    SpawnInCollision(Vec<String>),
    #[error("unsupported resolution {0}x{1}")]
    UnsupportedResolution(u32, u32),
    #[error("invalid static body: {0}")]
    InvalidBody(String),
    #[error(transparent)]
    Asset(#[from] AssetError),
    #[error(transparent)]
    Collision(#[from] CollisionError),
}

/// Base speed limits: linear in m/s (norm of the planar velocity), angular in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseCaps {
    pub linear: f64,
    pub angular: f64,
}

impl Default for BaseCaps {
    fn default() -> Self {
        Self {
            linear: 0.35,
            angular: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceConfig {
    pub dt: f64,
    pub seed: u64,
    pub ground_plane: bool,
    /// Overrides per-model caps when set.
    pub base_caps: Option<BaseCaps>,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            seed: 0,
            ground_plane: true,
            base_caps: None,
        }
    }
}

impl InstanceConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::InvalidDt(self.dt));
        }
        if let Some(c) = self.base_caps {
            if !(c.linear >= 0.0 && c.angular >= 0.0 && c.linear.is_finite() && c.angular.is_finite()) {
                return Err(SimError::NonFinite("base_caps"));
            }
        }
        Ok(())
    }
}

/// Planar base pose; `theta` is kept in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }
}
