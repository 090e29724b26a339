//! Workspace computation: rejection sampling of chain configurations across
//! independent instances, manipulability evaluation, merge, normalization
//! and point-cloud export.

mod export;
mod sample;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assets::{AssetError, RobotAsset};
use crate::kinematics::{chain_fk, JacobianMode, KinematicsError};
use crate::urdf::{KinematicChain, UrdfError};

pub use export::{color_for, export_cloud, to_csv_string, to_ply_string, ExportFormat};
pub use sample::{sample_workspace, Rejection, SampleOptions, SampleRun, DEFAULT_REJECTION_CAP};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const ADJACENCY_RULE: &str = "parent-child links excluded, plus model ignore list";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorkspaceError {
    #[error("chain {0} has no movable joints")]
    ZeroDof(String),
    #[error("counts must be positive")]
    InvalidCount,
    #[error("instance {instance} hit {cap} consecutive rejections")]
    Unsatisfiable { instance: usize, cap: u64 },
    #[error("cloud is empty")]
    Empty,
    #[error("every sample has zero manipulability")]
    Degenerate,
    #[error("cannot merge: {0}")]
    Mismatch(String),
    #[error("cloud is not normalized")]
    Unnormalized,
    #[error("cloud is already normalized; merge raw clouds, then normalize")]
    AlreadyNormalized,
    #[error("unknown chain `{0}`")]
    UnknownChain(String),
    #[error("invalid parallelism: {0}")]
    Parallelism(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Urdf(#[from] UrdfError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Asset(#[from] AssetError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceSample {
    /// Tip position in the chain base frame (m).
    pub position: [f64; 3],
    /// Chain joint values, base to tip.
    pub q: Vec<f64>,
    pub w_raw: f64,
    pub w_norm: Option<f64>,
}

/// Run parameters recorded with every cloud and written into export headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub n_instances: usize,
    pub per_instance_target: usize,
    pub chain: String,
    pub mode: JacobianMode,
    pub model_sha256: String,
    pub adjacency_rule: String,
    pub version: String,
    pub sampling: String,
    pub rest_posture: String,
    pub collision_check: bool,
}

impl Provenance {
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("seed", self.seed.to_string()),
            ("n_instances", self.n_instances.to_string()),
            ("per_instance_target", self.per_instance_target.to_string()),
            ("chain", self.chain.clone()),
            ("mode", self.mode.to_string()),
            ("model_sha256", self.model_sha256.clone()),
            ("adjacency_rule", self.adjacency_rule.clone()),
            ("version", self.version.clone()),
            ("sampling", self.sampling.clone()),
            ("rest_posture", self.rest_posture.clone()),
            ("collision_check", self.collision_check.to_string()),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    PerChain,
    Joint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceCloud {
    pub base_link: String,
    pub tip_link: String,
    pub joint_names: Vec<String>,
    pub mode: JacobianMode,
    pub model_sha256: String,
    pub samples: Vec<WorkspaceSample>,
    /// One entry per merged part, in merge order.
    pub provenance: Vec<Provenance>,
    pub normalization: Option<Normalization>,
}

impl WorkspaceCloud {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization.is_some()
    }

    pub fn chain_id(&self) -> String {
        format!("{},{}", self.base_link, self.tip_link)
    }

    pub fn max_w_raw(&self) -> f64 {
        self.samples.iter().map(|s| s.w_raw).fold(0.0, f64::max)
    }

    /// Header entries for exports. A single part is written flat; merged
    /// parts are prefixed `part<i>.`.
    pub fn header_entries(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if let [p] = self.provenance.as_slice() {
            out.extend(p.entries().into_iter().map(|(k, v)| (k.to_string(), v)));
        } else {
            out.push(("parts".to_string(), self.provenance.len().to_string()));
            for (i, p) in self.provenance.iter().enumerate() {
                out.extend(p.entries().into_iter().map(|(k, v)| (format!("part{i}.{k}"), v)));
            }
        }
        out.push(("joints".to_string(), self.joint_names.join(",")));
        out.push((
            "normalization".to_string(),
            match self.normalization {
                None => "none",
                Some(Normalization::PerChain) => "per_chain",
                Some(Normalization::Joint) => "joint",
            }
            .to_string(),
        ));
        out
    }
}

/// Resolves `name` as a sidecar chain name or a literal `base,tip` pair.
pub fn resolve_chain(asset: &RobotAsset, name: &str) -> Result<KinematicChain, WorkspaceError> {
    let (base, tip) = match asset.profile.chains.get(name) {
        Some((b, t)) => (b.as_str(), t.as_str()),
        None => name
            .split_once(',')
            .map(|(b, t)| (b.trim(), t.trim()))
            .ok_or_else(|| WorkspaceError::UnknownChain(name.to_string()))?,
    };
    Ok(asset.model.extract_chain(base, tip)?)
}

/// Concatenates raw clouds in the given order. Normalize afterwards.
pub fn merge_clouds(clouds: Vec<WorkspaceCloud>) -> Result<WorkspaceCloud, WorkspaceError> {
    let mut it = clouds.into_iter();
    let mut out = it.next().ok_or(WorkspaceError::Empty)?;
    if out.is_normalized() {
        return Err(WorkspaceError::AlreadyNormalized);
    }
    for c in it {
        if c.is_normalized() {
            return Err(WorkspaceError::AlreadyNormalized);
        }
        if c.chain_id() != out.chain_id() {
            return Err(WorkspaceError::Mismatch(format!("chain {} vs {}", c.chain_id(), out.chain_id())));
        }
        if c.mode != out.mode {
            return Err(WorkspaceError::Mismatch(format!("mode {} vs {}", c.mode, out.mode)));
        }
        if c.model_sha256 != out.model_sha256 {
            return Err(WorkspaceError::Mismatch("model hash".to_string()));
        }
        out.samples.extend(c.samples);
        out.provenance.extend(c.provenance);
    }
    Ok(out)
}

fn apply_norm(cloud: &mut WorkspaceCloud, max: f64, how: Normalization) {
    for s in &mut cloud.samples {
        s.w_norm = Some(s.w_raw / max);
    }
    cloud.normalization = Some(how);
}

/// Divides every `w_raw` by the cloud maximum, so the maximum maps to exactly 1.0.
pub fn normalize_workspace(mut cloud: WorkspaceCloud) -> Result<WorkspaceCloud, WorkspaceError> {
    if cloud.is_empty() {
        return Err(WorkspaceError::Empty);
    }
    let max = cloud.max_w_raw();
    if !(max > 0.0) {
        return Err(WorkspaceError::Degenerate);
    }
    apply_norm(&mut cloud, max, Normalization::PerChain);
    Ok(cloud)
}

/// Normalizes several clouds against their common maximum.
pub fn normalize_jointly(mut clouds: Vec<WorkspaceCloud>) -> Result<Vec<WorkspaceCloud>, WorkspaceError> {
    if clouds.iter().all(|c| c.is_empty()) {
        return Err(WorkspaceError::Empty);
    }
    let max = clouds.iter().map(|c| c.max_w_raw()).fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(WorkspaceError::Degenerate);
    }
    for c in &mut clouds {
        apply_norm(c, max, Normalization::Joint);
    }
    Ok(clouds)
}

/// Findings of a full replay of a cloud through kinematics and collision.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub checked: usize,
    pub out_of_limits: Vec<usize>,
    pub colliding: Vec<usize>,
    pub position_mismatch: Vec<usize>,
    pub w_mismatch: Vec<usize>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.out_of_limits.is_empty()
            && self.colliding.is_empty()
            && self.position_mismatch.is_empty()
            && self.w_mismatch.is_empty()
    }
}

/// Replays every sample: limits, chain FK position, manipulability and a
/// whole-model self-collision check with non-chain joints at rest.
pub fn audit_cloud(asset: &RobotAsset, cloud: &WorkspaceCloud) -> Result<AuditReport, WorkspaceError> {
    let chain = asset.model.extract_chain(&cloud.base_link, &cloud.tip_link)?;
    let idx = sample::chain_dof_indices(asset, &chain)?;
    let checker = asset.self_collision_checker();
    let mut report = AuditReport::default();
    let mut full = asset.rest_vector();
    for (k, s) in cloud.samples.iter().enumerate() {
        report.checked += 1;
        if s.q.len() != chain.dof() || !chain.joints.iter().zip(&s.q).all(|(j, &v)| j.limits.contains(v)) {
            report.out_of_limits.push(k);
            continue;
        }
        let p = chain_fk(&chain, &s.q)?.translation;
        if [p.x, p.y, p.z] != s.position {
            report.position_mismatch.push(k);
        }
        if crate::kinematics::manipulability(&chain, &s.q, cloud.mode)? != s.w_raw {
            report.w_mismatch.push(k);
        }
        for (&i, &v) in idx.iter().zip(&s.q) {
            full[i] = v;
        }
        if !checker.check(&full)?.is_empty() {
            report.colliding.push(k);
        }
    }
    Ok(report)
}

/// Summary statistics of a normalized cloud.
pub fn summary(cloud: &WorkspaceCloud) -> IndexMap<&'static str, f64> {
    let mut m = IndexMap::new();
    let n = cloud.len() as f64;
    let w: Vec<f64> = cloud.samples.iter().map(|s| s.w_raw).collect();
    m.insert("samples", n);
    m.insert("w_raw_max", cloud.max_w_raw());
    m.insert("w_raw_min", w.iter().copied().fold(f64::INFINITY, f64::min));
    m.insert("w_raw_mean", w.iter().sum::<f64>() / n.max(1.0));
    m
}
