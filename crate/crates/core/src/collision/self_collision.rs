use std::collections::HashSet;

use super::{pair_distance, Aabb, Shape};
use crate::kinematics::{Configuration, KinematicTree, KinematicsError};
use crate::math::Pose;
use crate::urdf::{ordered_pair, RobotModel};

/// Precomputed self-collision query for one model: link shapes, the pair
/// list after adjacency and ignore-list exclusion, and AABB pruning.
#[derive(Debug, Clone)]
pub struct SelfCollisionChecker {
    tree: KinematicTree,
    shapes: Vec<Vec<(Shape, Pose)>>,
    pairs: Vec<(usize, usize)>,
    prune: bool,
}

impl SelfCollisionChecker {
    pub fn new(model: &RobotModel, ignore_pairs: &[(String, String)]) -> Self {
        let tree = KinematicTree::new(model);
        let shapes: Vec<Vec<(Shape, Pose)>> = tree
            .link_names()
            .iter()
            .map(|n| {
                model
                    .link(n)
                    .map(|l| l.collisions.iter().map(|c| (c.shape, c.origin)).collect())
                    .unwrap_or_default()
            })
            .collect();

        let mut excluded: HashSet<(String, String)> = model.adjacent_pairs().into_iter().collect();
        excluded.extend(ignore_pairs.iter().map(|(a, b)| ordered_pair(a, b)));

        let names = tree.link_names();
        let mut pairs = Vec::new();
        for i in 0..names.len() {
            for j in (i + 1)..names.len() {
                if shapes[i].is_empty() || shapes[j].is_empty() {
                    continue;
                }
                if excluded.contains(&ordered_pair(&names[i], &names[j])) {
                    continue;
                }
                pairs.push((i, j));
            }
        }
        Self {
            tree,
            shapes,
            pairs,
            prune: true,
        }
    }

    /// Disables the AABB broad phase (every candidate pair reaches the narrow phase).
    pub fn without_pruning(mut self) -> Self {
        self.prune = false;
        self
    }

    pub fn tree(&self) -> &KinematicTree {
        &self.tree
    }

    /// Link pairs checked by the narrow phase, by name.
    pub fn candidate_pairs(&self) -> Vec<(String, String)> {
        let names = self.tree.link_names();
        self.pairs
            .iter()
            .map(|&(i, j)| (names[i].clone(), names[j].clone()))
            .collect()
    }

    fn link_aabb(&self, link: usize, pose: &Pose) -> Option<Aabb> {
        self.shapes[link]
            .iter()
            .map(|(s, o)| s.aabb(&pose.compose(o)))
            .reduce(|a, b| a.merge(&b))
    }

    /// Minimum signed distance over the shapes of two links at the given link poses.
    pub fn link_distance(&self, poses: &[Pose], i: usize, j: usize) -> f64 {
        let mut best = f64::INFINITY;
        for (sa, oa) in &self.shapes[i] {
            let pa = poses[i].compose(oa);
            for (sb, ob) in &self.shapes[j] {
                let pb = poses[j].compose(ob);
                best = best.min(pair_distance(sa, &pa, sb, &pb).signed_distance);
            }
        }
        best
    }

    fn aabbs(&self, poses: &[Pose]) -> Vec<Option<Aabb>> {
        if self.prune {
            (0..poses.len()).map(|l| self.link_aabb(l, &poses[l])).collect()
        } else {
            Vec::new()
        }
    }

    fn pair_hits(&self, poses: &[Pose], aabbs: &[Option<Aabb>], i: usize, j: usize) -> bool {
        if self.prune {
            if let (Some(a), Some(b)) = (&aabbs[i], &aabbs[j]) {
                if !a.intersects(b) {
                    return false;
                }
            }
        }
        self.link_distance(poses, i, j) < 0.0
    }

    /// Colliding link index pairs given link poses from [`KinematicTree::fk`].
    pub fn colliding_at_poses(&self, poses: &[Pose]) -> Vec<(usize, usize)> {
        let aabbs = self.aabbs(poses);
        self.pairs
            .iter()
            .copied()
            .filter(|&(i, j)| self.pair_hits(poses, &aabbs, i, j))
            .collect()
    }

    /// Whether any candidate pair penetrates, stopping at the first hit.
    pub fn any_collision(&self, q: &[f64]) -> Result<bool, KinematicsError> {
        let poses = self.tree.fk(q)?;
        let aabbs = self.aabbs(&poses);
        Ok(self.pairs.iter().any(|&(i, j)| self.pair_hits(&poses, &aabbs, i, j)))
    }

    /// Colliding link-name pairs at dense configuration `q` (tree order).
    pub fn check(&self, q: &[f64]) -> Result<Vec<(String, String)>, KinematicsError> {
        let poses = self.tree.fk(q)?;
        let names = self.tree.link_names();
        Ok(self
            .colliding_at_poses(&poses)
            .into_iter()
            .map(|(i, j)| ordered_pair(&names[i], &names[j]))
            .collect())
    }
}

/// Unordered link pairs that penetrate at `q`, excluding joint-adjacent
/// pairs and `ignore_pairs`. An empty result means collision-free.
pub fn self_collision(
    model: &RobotModel,
    q: &Configuration,
    ignore_pairs: &[(String, String)],
) -> Result<Vec<(String, String)>, KinematicsError> {
    let checker = SelfCollisionChecker::new(model, ignore_pairs);
    let values = checker.tree().vector_from(q)?;
    checker.check(&values)
}
