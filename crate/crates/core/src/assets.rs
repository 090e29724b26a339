//! Robot assets: a parsed model plus its sidecar profile (postures, sensor
//! mounts, self-collision ignore list) and the precompiled structures every
//! simulation and sampling step reuses.

use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::SelfCollisionChecker;
use crate::kinematics::KinematicTree;
use crate::sensors::{CameraSpec, LaserSpec};
use crate::sim::BaseCaps;
use crate::urdf::{parse_urdf, validate_model, RobotModel, UrdfError};

pub const STAND: &str = "Stand";
pub const STAND_ZERO: &str = "StandZero";

const BUNDLED: &[(&str, &str, Option<&str>)] = &[
    (
        "pepper_simple",
        include_str!("../models/pepper_simple.urdf"),
        Some(include_str!("../models/pepper_simple.json")),
    ),
    (
        "nao_simple",
        include_str!("../models/nao_simple.urdf"),
        Some(include_str!("../models/nao_simple.json")),
    ),
    ("two_link", include_str!("../models/two_link.urdf"), None),
    ("planar_2r", include_str!("../models/planar_2r.urdf"), None),
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssetError {
    #[error(transparent)]
    Urdf(#[from] UrdfError),
    #[error("model has validation errors: {0}")]
    Invalid(String),
    #[error("bad profile: {0}")]
    Profile(String),
    #[error("unknown bundled model `{0}`")]
    UnknownModel(String),
}

pub type Posture = IndexMap<String, f64>;

/// Per-model sidecar (`<model>.json` next to the URDF).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelProfile {
    /// Height of the root link above the ground when spawned.
    #[serde(default)]
    pub base_height: f64,
    #[serde(default)]
    pub ignore_pairs: Vec<(String, String)>,
    /// Named kinematic chains as (base link, tip link).
    #[serde(default)]
    pub chains: IndexMap<String, (String, String)>,
    #[serde(default)]
    pub postures: IndexMap<String, Posture>,
    #[serde(default)]
    pub lasers: Vec<LaserSpec>,
    #[serde(default)]
    pub cameras: Vec<CameraSpec>,
    #[serde(default)]
    pub base_caps: Option<BaseCaps>,
}

impl ModelProfile {
    pub fn from_json(text: &str) -> Result<Self, AssetError> {
        serde_json::from_str(text).map_err(|e| AssetError::Profile(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct RobotAsset {
    pub model: RobotModel,
    pub profile: ModelProfile,
    tree: KinematicTree,
    checker: SelfCollisionChecker,
    sha256: String,
}

impl RobotAsset {
    pub fn new(model: RobotModel, mut profile: ModelProfile) -> Result<Self, AssetError> {
        let report = validate_model(&model);
        if report.has_errors() {
            let msgs: Vec<String> = report
                .errors()
                .map(|f| format!("{}: {}", f.element, f.message))
                .collect();
            return Err(AssetError::Invalid(msgs.join("; ")));
        }
        let tree = KinematicTree::new(&model);

        if !profile.postures.contains_key(STAND_ZERO) {
            let zeros = tree.movable_joints().iter().map(|n| (n.clone(), 0.0)).collect();
            profile.postures.insert(STAND_ZERO.to_string(), zeros);
        }
        for (name, posture) in &profile.postures {
            for (joint, &value) in posture {
                let j = model
                    .joint(joint)
                    .filter(|j| j.kind.is_movable())
                    .ok_or_else(|| AssetError::Profile(format!("posture `{name}` names unknown joint `{joint}`")))?;
                if !j.limits.is_some_and(|l| l.contains(value)) {
                    return Err(AssetError::Profile(format!(
                        "posture `{name}` puts `{joint}` outside its limits"
                    )));
                }
            }
        }
        let links = profile
            .ignore_pairs
            .iter()
            .flat_map(|(a, b)| [a, b])
            .chain(profile.chains.values().flat_map(|(a, b)| [a, b]))
            .chain(profile.lasers.iter().map(|l| &l.link))
            .chain(profile.cameras.iter().map(|c| &c.link));
        for l in links {
            if model.link(l).is_none() {
                return Err(AssetError::Profile(format!("unknown link `{l}`")));
            }
        }

        let checker = SelfCollisionChecker::new(&model, &profile.ignore_pairs);
        let sha256 = model.sha256();
        Ok(Self {
            model,
            profile,
            tree,
            checker,
            sha256,
        })
    }

    pub fn from_urdf_str(urdf: &str, profile: Option<&str>) -> Result<Self, AssetError> {
        let model = parse_urdf(urdf)?;
        let profile = profile.map(ModelProfile::from_json).transpose()?.unwrap_or_default();
        Self::new(model, profile)
    }

    /// Loads a URDF file and, when present, the `<stem>.json` sidecar beside it.
    pub fn from_urdf_path(path: impl AsRef<Path>) -> Result<Self, AssetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| UrdfError::Io(format!("{}: {e}", path.display())))?;
        let sidecar = path.with_extension("json");
        let profile = match std::fs::read_to_string(&sidecar) {
            Ok(s) => Some(s),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => return Err(AssetError::Profile(format!("{}: {e}", sidecar.display()))),
        };
        Self::from_urdf_str(&text, profile.as_deref())
    }

    pub fn bundled(name: &str) -> Result<Self, AssetError> {
        let (_, urdf, profile) = BUNDLED
            .iter()
            .find(|(n, _, _)| *n == name)
            .ok_or_else(|| AssetError::UnknownModel(name.to_string()))?;
        Self::from_urdf_str(urdf, *profile)
    }

    pub fn bundled_names() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(n, _, _)| *n)
    }

    /// Raw URDF text of a bundled model.
    pub fn bundled_urdf(name: &str) -> Option<&'static str> {
        BUNDLED.iter().find(|(n, _, _)| *n == name).map(|(_, u, _)| *u)
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn name(&self) -> &str {
        &self.model.name
    }

    pub fn tree(&self) -> &KinematicTree {
        &self.tree
    }

    pub fn self_collision_checker(&self) -> &SelfCollisionChecker {
        &self.checker
    }

    pub fn sha256(&self) -> &str {
        &self.sha256
    }

    pub fn posture(&self, name: &str) -> Option<&Posture> {
        self.profile.postures.get(name)
    }

    /// Every movable joint at zero, clamped into its limits (tree order).
    pub fn zero_vector(&self) -> Vec<f64> {
        self.tree
            .movable_joints()
            .iter()
            .map(|n| {
                let j = self.model.joint(n).expect("tree joints come from the model");
                j.limits.map_or(0.0, |l| l.clamp(0.0))
            })
            .collect()
    }

    /// Rest pose used for joints outside a sampled chain: the `Stand` posture
    /// where it defines a joint, otherwise the clamped zero.
    pub fn rest_vector(&self) -> Vec<f64> {
        let mut q = self.zero_vector();
        if let Some(stand) = self.posture(STAND) {
            for (joint, &v) in stand {
                if let Some(i) = self.tree.dof_index(joint) {
                    q[i] = v;
                }
            }
        }
        q
    }

    pub fn laser(&self, id: &str) -> Option<&LaserSpec> {
        self.profile.lasers.iter().find(|l| l.id == id)
    }

    pub fn camera(&self, id: &str) -> Option<&CameraSpec> {
        self.profile.cameras.iter().find(|c| c.id == id)
    }
}
