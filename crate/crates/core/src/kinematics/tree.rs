use std::collections::HashMap;

use indexmap::IndexMap;

use super::{Configuration, KinematicsError};
use crate::math::Pose;
use crate::urdf::{Joint, RobotModel};

pub type LinkPoses = IndexMap<String, Pose>;

#[derive(Debug, Clone)]
struct TreeJoint {
    joint: Joint,
    parent: usize,
    child: usize,
    /// Index into the movable-joint vector, `None` for fixed joints.
    dof: Option<usize>,
}

/// A model compiled for repeated forward kinematics: links are indexed and
/// joints are sorted so every parent precedes its children.
#[derive(Debug, Clone)]
pub struct KinematicTree {
    links: Vec<String>,
    link_index: HashMap<String, usize>,
    root: usize,
    joints: Vec<TreeJoint>,
    movable: Vec<String>,
    movable_index: HashMap<String, usize>,
}

impl KinematicTree {
    /// The model is assumed to be a valid tree (as produced by `parse_urdf`).
    pub fn new(model: &RobotModel) -> Self {
        let links: Vec<String> = model.links.iter().map(|l| l.name.clone()).collect();
        let link_index: HashMap<String, usize> =
            links.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let movable: Vec<String> = model.movable_joints().map(|j| j.name.clone()).collect();
        let movable_index: HashMap<String, usize> =
            movable.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();

        let mut children: HashMap<&str, Vec<&Joint>> = HashMap::new();
        for j in &model.joints {
            children.entry(j.parent.as_str()).or_default().push(j);
        }
        // breadth-first from the root keeps model order among siblings
        let mut joints = Vec::with_capacity(model.joints.len());
        let mut queue = std::collections::VecDeque::from([model.root_link.as_str()]);
        while let Some(link) = queue.pop_front() {
            for j in children.get(link).into_iter().flatten() {
                joints.push(TreeJoint {
                    joint: (*j).clone(),
                    parent: link_index[&j.parent],
                    child: link_index[&j.child],
                    dof: movable_index.get(&j.name).copied(),
                });
                queue.push_back(j.child.as_str());
            }
        }
        KinematicTree {
            root: link_index[&model.root_link],
            links,
            link_index,
            joints,
            movable,
            movable_index,
        }
    }

    pub fn link_names(&self) -> &[String] {
        &self.links
    }

    pub fn link_index(&self, name: &str) -> Option<usize> {
        self.link_index.get(name).copied()
    }

    /// Movable joint names; the order of the `q` vectors accepted by [`Self::fk`].
    pub fn movable_joints(&self) -> &[String] {
        &self.movable
    }

    pub fn dof_index(&self, joint: &str) -> Option<usize> {
        self.movable_index.get(joint).copied()
    }

    /// Orders `cfg` into a dense vector; every movable joint must be present.
    pub fn vector_from(&self, cfg: &Configuration) -> Result<Vec<f64>, KinematicsError> {
        let q = self
            .movable
            .iter()
            .map(|n| match cfg.get(n) {
                None => Err(KinematicsError::MissingJoint(n.clone())),
                Some(v) if v.is_nan() => Err(KinematicsError::NotANumber(n.clone())),
                Some(v) => Ok(v),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(q)
    }

    /// Link poses in the root frame, indexed like [`Self::link_names`].
    pub fn fk(&self, q: &[f64]) -> Result<Vec<Pose>, KinematicsError> {
        if q.len() != self.movable.len() {
            return Err(KinematicsError::DimensionMismatch {
                expected: self.movable.len(),
                got: q.len(),
            });
        }
        let mut poses = vec![Pose::identity(); self.links.len()];
        self.fk_into(q, &mut poses);
        Ok(poses)
    }

    pub(crate) fn fk_into(&self, q: &[f64], poses: &mut [Pose]) {
        poses[self.root] = Pose::identity();
        for tj in &self.joints {
            let value = tj.dof.map_or(0.0, |i| q[i]);
            poses[tj.child] = poses[tj.parent].compose(&tj.joint.local_transform(value));
        }
    }
}

/// Poses of every link in the root frame.
pub fn forward_kinematics(model: &RobotModel, q: &Configuration) -> Result<LinkPoses, KinematicsError> {
    let tree = KinematicTree::new(model);
    let values = tree.vector_from(q)?;
    let poses = tree.fk(&values)?;
    Ok(tree.links.iter().cloned().zip(poses).collect())
}
