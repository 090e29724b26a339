use nalgebra::Vector3;

use super::{JointKind, JointLimits, RobotModel, UrdfError};
use crate::math::Pose;

/// One movable joint of a chain. `pre` is the constant transform from the
/// previous movable joint's moving frame (or the chain base) to this joint's
/// frame, with every intermediate fixed joint folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainJoint {
    pub name: String,
    pub kind: JointKind,
    pub pre: Pose,
    pub axis: Vector3<f64>,
    pub limits: JointLimits,
}

impl ChainJoint {
    pub fn motion(&self, value: f64) -> Pose {
        if self.kind.is_rotational() {
            Pose::from_axis_angle(&self.axis, value)
        } else {
            Pose::from_translation(self.axis * value)
        }
    }
}

/// Serial chain between two links of a model, ordered base → tip.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicChain {
    pub base_link: String,
    pub tip_link: String,
    pub joints: Vec<ChainJoint>,
    /// Fixed transform from the last movable joint frame to the tip link.
    pub tail: Pose,
}

impl KinematicChain {
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn joint_names(&self) -> Vec<&str> {
        self.joints.iter().map(|j| j.name.as_str()).collect()
    }

    /// Extracts the chain from `base_link` down to `tip_link`.
    pub fn extract(model: &RobotModel, base_link: &str, tip_link: &str) -> Result<Self, UrdfError> {
        for l in [base_link, tip_link] {
            if model.link(l).is_none() {
                return Err(UrdfError::UnknownLink(l.to_string()));
            }
        }
        let parents = model.parent_index();
        let mut path = Vec::new();
        let mut cur = tip_link;
        while cur != base_link {
            match parents.get(cur) {
                Some(&ji) => {
                    path.push(ji);
                    cur = &model.joints[ji].parent;
                }
                None => {
                    return Err(UrdfError::NotADescendant {
                        base: base_link.to_string(),
                        tip: tip_link.to_string(),
                    })
                }
            }
        }
        path.reverse();

        let mut joints = Vec::new();
        let mut acc = Pose::identity();
        for ji in path {
            let j = &model.joints[ji];
            acc = acc.compose(&j.origin);
            if j.kind.is_movable() {
                let limits = j.limits.ok_or_else(|| UrdfError::MissingLimits(j.name.clone()))?;
                joints.push(ChainJoint {
                    name: j.name.clone(),
                    kind: j.kind,
                    pre: acc,
                    axis: j.axis,
                    limits,
                });
                acc = Pose::identity();
            }
        }
        Ok(KinematicChain {
            base_link: base_link.to_string(),
            tip_link: tip_link.to_string(),
            joints,
            tail: acc,
        })
    }
}

impl RobotModel {
    pub fn extract_chain(&self, base_link: &str, tip_link: &str) -> Result<KinematicChain, UrdfError> {
        KinematicChain::extract(self, base_link, tip_link)
    }
}
