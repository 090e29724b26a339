//! Forward kinematics, geometric Jacobians and the Yoshikawa manipulability
//! measure.

mod config;
mod jacobian;
mod svd;
mod tree;

use thiserror::Error;

pub use config::Configuration;
pub use jacobian::{chain_fk, geometric_jacobian, manipulability, manipulability_of, Jacobian, JacobianMode};
pub use svd::singular_values;
pub use tree::{forward_kinematics, KinematicTree, LinkPoses};

/// Smallest singular value below which a configuration counts as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("no value for joint `{0}`")]
    MissingJoint(String),
    #[error("unknown joint `{0}`")]
    UnknownJoint(String),
    #[error("value for joint `{0}` is NaN")]
    NotANumber(String),
    #[error("value {value} for joint `{joint}` outside [{lower}, {upper}]")]
    OutOfLimits {
        joint: String,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("expected {expected} joint values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("manipulability needs at least one joint")]
    EmptyChain,
}
