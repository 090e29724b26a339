//! URDF robot descriptions: parsing, validation, serialization and
//! kinematic-chain extraction.
//!
//! The supported subset covers `link`, `joint` (revolute, continuous,
//! prismatic, fixed), `origin`, `axis`, `limit`, `inertial` and `collision`
//! geometry built from box, sphere, cylinder and capsule primitives. A
//! `mesh` collision element is accepted only through its `capsule_approx`
//! attribute (`"radius half_length"`); the mesh file itself is never read.

mod chain;
mod parse;
mod validate;
mod write;

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::collision::Shape;
use crate::math::Pose;

pub use chain::{ChainJoint, KinematicChain};
pub use parse::{parse_urdf, parse_urdf_file};
pub use validate::{validate_model, Finding, Severity, ValidationReport};
pub use write::to_urdf_string;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UrdfError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("malformed element: {0}")]
    Malformed(String),
    #[error("unknown joint kind `{kind}` on joint `{joint}`")]
    UnknownJointKind { joint: String, kind: String },
    #[error("unsupported joint kind `{kind}` on joint `{joint}` (planar/floating bases are driven by the simulator)")]
    UnsupportedJointKind { joint: String, kind: String },
    #[error("joint `{joint}` references undeclared link `{link}`")]
    DanglingLink { joint: String, link: String },
    #[error("duplicate {what} name `{name}`")]
    Duplicate { what: &'static str, name: String },
    #[error("kinematic structure is not a tree: {0}")]
    NotATree(String),
    #[error("joint `{0}` requires a <limit> element")]
    MissingLimits(String),
    #[error("unknown link `{0}`")]
    UnknownLink(String),
    #[error("link `{tip}` is not a descendant of `{base}`")]
    NotADescendant { base: String, tip: String },
    #[error("io error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointKind {
    Revolute,
    Continuous,
    Prismatic,
    Fixed,
}

impl JointKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            JointKind::Revolute => "revolute",
            JointKind::Continuous => "continuous",
            JointKind::Prismatic => "prismatic",
            JointKind::Fixed => "fixed",
        }
    }

    pub fn is_movable(&self) -> bool {
        !matches!(self, JointKind::Fixed)
    }

    pub fn is_rotational(&self) -> bool {
        matches!(self, JointKind::Revolute | JointKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inertial {
    pub mass: f64,
    pub center_of_mass: Pose,
    pub inertia: Matrix3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionShape {
    pub shape: Shape,
    pub origin: Pose,
    /// Mesh file this shape stands in for, if it came from a `<mesh>` tag.
    pub mesh_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub name: String,
    pub inertial: Option<Inertial>,
    pub collisions: Vec<CollisionShape>,
    pub visual_mesh_ref: Option<String>,
}

impl Link {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            inertial: None,
            collisions: Vec::new(),
            visual_mesh_ref: None,
        }
    }
}

/// Continuous joints carry `lower = -inf`, `upper = +inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLimits {
    pub lower: f64,
    pub upper: f64,
    pub velocity: f64,
    pub effort: f64,
}

impl JointLimits {
    pub fn contains(&self, value: f64) -> bool {
        value >= self.lower && value <= self.upper
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.lower, self.upper)
    }

    /// Finite sampling interval; unbounded sides fall back to ±π.
    pub fn sampling_range(&self) -> (f64, f64) {
        use std::f64::consts::PI;
        let lo = if self.lower.is_finite() { self.lower } else { -PI };
        let hi = if self.upper.is_finite() { self.upper } else { PI };
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub name: String,
    pub kind: JointKind,
    pub parent: String,
    pub child: String,
    pub origin: Pose,
    pub axis: Vector3<f64>,
    pub limits: Option<JointLimits>,
}

impl Joint {
    /// Local transform of the child frame relative to the parent frame at `value`.
    pub fn local_transform(&self, value: f64) -> Pose {
        self.origin.compose(&self.motion(value))
    }

    pub fn motion(&self, value: f64) -> Pose {
        match self.kind {
            JointKind::Fixed => Pose::identity(),
            JointKind::Revolute | JointKind::Continuous => Pose::from_axis_angle(&self.axis, value),
            JointKind::Prismatic => Pose::from_translation(self.axis * value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    pub name: String,
    pub links: Vec<Link>,
    pub joints: Vec<Joint>,
    pub root_link: String,
}

impl RobotModel {
    pub fn link(&self, name: &str) -> Option<&Link> {
        self.links.iter().find(|l| l.name == name)
    }

    pub fn joint(&self, name: &str) -> Option<&Joint> {
        self.joints.iter().find(|j| j.name == name)
    }

    /// Joint whose child is `link`, if any.
    pub fn parent_joint(&self, link: &str) -> Option<&Joint> {
        self.joints.iter().find(|j| j.child == link)
    }

    pub fn movable_joints(&self) -> impl Iterator<Item = &Joint> {
        self.joints.iter().filter(|j| j.kind.is_movable())
    }

    /// Unordered link pairs connected directly by a joint.
    pub fn adjacent_pairs(&self) -> Vec<(String, String)> {
        self.joints
            .iter()
            .map(|j| ordered_pair(&j.parent, &j.child))
            .collect()
    }

    /// Hex SHA-256 of the canonical URDF serialization.
    pub fn sha256(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(to_urdf_string(self).as_bytes()))
    }

    /// Maps link name → parent joint index; used by FK and chain extraction.
    pub(crate) fn parent_index(&self) -> HashMap<&str, usize> {
        self.joints
            .iter()
            .enumerate()
            .map(|(i, j)| (j.child.as_str(), i))
            .collect()
    }
}

pub(crate) fn ordered_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}
