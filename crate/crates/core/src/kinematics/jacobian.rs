use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use super::{singular_values, KinematicsError, SINGULARITY_THRESHOLD};
use crate::math::Pose;
use crate::urdf::KinematicChain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum JacobianMode {
    /// Linear and angular velocity rows (6×n).
    #[default]
    #[serde(rename = "full6")]
    Full6,
    /// Linear velocity rows only (3×n).
    #[serde(rename = "pos3")]
    Position3,
}

impl JacobianMode {
    pub fn rows(&self) -> usize {
        match self {
            JacobianMode::Full6 => 6,
            JacobianMode::Position3 => 3,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            JacobianMode::Full6 => "full6",
            JacobianMode::Position3 => "pos3",
        }
    }
}

impl fmt::Display for JacobianMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for JacobianMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full6" | "full_6" => Ok(JacobianMode::Full6),
            "pos3" | "position_3" => Ok(JacobianMode::Position3),
            other => Err(format!("unknown jacobian mode `{other}` (expected full6 or pos3)")),
        }
    }
}

/// Geometric Jacobian of a chain, expressed in the chain base frame with the
/// tip-frame origin as reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub matrix: DMatrix<f64>,
    pub reference_point: Vector3<f64>,
    pub mode: JacobianMode,
}

fn check_dim(chain: &KinematicChain, q: &[f64]) -> Result<(), KinematicsError> {
    if q.len() != chain.dof() {
        return Err(KinematicsError::DimensionMismatch {
            expected: chain.dof(),
            got: q.len(),
        });
    }
    Ok(())
}

/// Tip pose in the chain base frame.
pub fn chain_fk(chain: &KinematicChain, q: &[f64]) -> Result<Pose, KinematicsError> {
    check_dim(chain, q)?;
    let mut t = Pose::identity();
    for (j, &v) in chain.joints.iter().zip(q) {
        t = t.compose(&j.pre).compose(&j.motion(v));
    }
    Ok(t.compose(&chain.tail))
}

pub fn geometric_jacobian(
    chain: &KinematicChain,
    q: &[f64],
    mode: JacobianMode,
) -> Result<Jacobian, KinematicsError> {
    check_dim(chain, q)?;
    let n = chain.dof();
    let mut axes = Vec::with_capacity(n);
    let mut t = Pose::identity();
    for (j, &v) in chain.joints.iter().zip(q) {
        let frame = t.compose(&j.pre);
        axes.push((frame.rotation * j.axis, frame.translation));
        t = frame.compose(&j.motion(v));
    }
    let tip = t.compose(&chain.tail).translation;

    let mut m = DMatrix::zeros(mode.rows(), n);
    for (i, ((z, p), j)) in axes.iter().zip(&chain.joints).enumerate() {
        let (lin, ang) = if j.kind.is_rotational() {
            (z.cross(&(tip - p)), *z)
        } else {
            (*z, Vector3::zeros())
        };
        m.fixed_view_mut::<3, 1>(0, i).copy_from(&lin);
        if mode == JacobianMode::Full6 {
            m.fixed_view_mut::<3, 1>(3, i).copy_from(&ang);
        }
    }
    Ok(Jacobian {
        matrix: m,
        reference_point: tip,
        mode,
    })
}

/// Yoshikawa manipulability of a Jacobian matrix: the product of its
/// singular values, or exactly zero when the smallest one is below
/// [`SINGULARITY_THRESHOLD`].
pub fn manipulability_of(matrix: &DMatrix<f64>) -> f64 {
    let sv = singular_values(matrix);
    match sv.last() {
        None => 0.0,
        Some(&min) if min < SINGULARITY_THRESHOLD => 0.0,
        Some(_) => sv.iter().product(),
    }
}

pub fn manipulability(chain: &KinematicChain, q: &[f64], mode: JacobianMode) -> Result<f64, KinematicsError> {
    if chain.dof() == 0 {
        return Err(KinematicsError::EmptyChain);
    }
    let j = geometric_jacobian(chain, q, mode)?;
    Ok(manipulability_of(&j.matrix))
}
