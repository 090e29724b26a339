use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Mutex, PoisonError};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::assets::{AssetError, ModelProfile, RobotAsset};
use crate::collision::{CollisionError, Shape};
use crate::kinematics::JacobianMode;
use crate::math::Pose;
use crate::sensors::{get_depth_image, get_laser_scan, Resolution};
use crate::sim::{Instance, InstanceConfig, Pose2D, Registry, SimError};
use crate::urdf::UrdfError;
use crate::workspace::{
    normalize_workspace, resolve_chain, sample_workspace, SampleOptions, WorkspaceError, DEFAULT_REJECTION_CAP,
};

/// Longest accepted request line in bytes (excluding the newline).
pub const MAX_LINE_BYTES: usize = 1 << 20;

pub const INVALID_PARAMS: i64 = 400;
pub const NOT_FOUND: i64 = 404;
pub const METHOD_NOT_FOUND: i64 = 405;
pub const INVALID_STATE: i64 = 409;
pub const INTERNAL: i64 = 500;

pub const METHODS: &[&str] = &[
    "create_instance",
    "reset_instance",
    "stop_instance",
    "spawn_robot",
    "remove_robot",
    "step",
    "set_angles",
    "get_angles",
    "go_to_posture",
    "move",
    "move_to",
    "get_odometry",
    "get_laser_scan",
    "get_depth_image",
    "world_collision",
    "sample_workspace",
    "add_static_body",
    "is_move_finished",
    "get_state_digest",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    #[serde(default)]
    pub id: Value,
    pub method: String,
    #[serde(default)]
    pub params: Value,
}

impl Request {
    pub fn new(id: u64, method: &str, params: Value) -> Self {
        Self {
            id: json!(id),
            method: method.to_string(),
            params,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: i64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub id: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
}

impl Response {
    pub fn ok(id: Value, result: Value) -> Self {
        Self {
            id,
            result: Some(result),
            error: None,
        }
    }

    pub fn err(id: Value, code: i64, message: impl Into<String>) -> Self {
        Self {
            id,
            result: None,
            error: Some(ErrorBody {
                code,
                message: message.into(),
            }),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("responses serialize")
    }
}

/// A protocol failure with its wire code.
#[derive(Debug, Clone, PartialEq)]
pub struct Fault {
    pub code: i64,
    pub message: String,
}

impl Fault {
    fn new(code: i64, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<SimError> for Fault {
    fn from(e: SimError) -> Self {
        use SimError::*;
        let code = match &e {
            UnknownInstance(_) | UnknownRobot(_) | UnknownJoint(_) | UnknownLink(_) | UnknownPosture(_)
            | UnknownLaser(_) | UnknownCamera(_) => NOT_FOUND,
            SpawnInCollision(_) => INVALID_STATE,
            Asset(a) => return a.clone().into(),
            _ => INVALID_PARAMS,
        };
        Fault::new(code, e.to_string())
    }
}

impl From<AssetError> for Fault {
    fn from(e: AssetError) -> Self {
        let code = match &e {
            AssetError::UnknownModel(_) | AssetError::Urdf(UrdfError::Io(_)) => NOT_FOUND,
            _ => INVALID_PARAMS,
        };
        Fault::new(code, e.to_string())
    }
}

impl From<WorkspaceError> for Fault {
    fn from(e: WorkspaceError) -> Self {
        let code = match &e {
            WorkspaceError::Unsatisfiable { .. } | WorkspaceError::Degenerate => INVALID_STATE,
            WorkspaceError::UnknownChain(_) | WorkspaceError::Urdf(UrdfError::UnknownLink(_)) => NOT_FOUND,
            WorkspaceError::Asset(a) => return a.clone().into(),
            _ => INVALID_PARAMS,
        };
        Fault::new(code, e.to_string())
    }
}

impl From<CollisionError> for Fault {
    fn from(e: CollisionError) -> Self {
        Fault::new(INVALID_PARAMS, e.to_string())
    }
}

fn params<T: DeserializeOwned>(v: &Value) -> Result<T, Fault> {
    let v = if v.is_null() { json!({}) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| Fault::new(INVALID_PARAMS, format!("invalid params: {e}")))
}

#[derive(Deserialize)]
struct InstanceRef {
    instance: u64,
}

#[derive(Deserialize)]
struct RobotRef {
    instance: u64,
    robot: u64,
}

#[derive(Deserialize)]
struct SpawnParams {
    instance: u64,
    #[serde(default)]
    model: Option<String>,
    #[serde(default)]
    urdf: Option<String>,
    #[serde(default)]
    profile: Option<ModelProfile>,
    #[serde(default)]
    pose: Pose2D,
}

#[derive(Deserialize)]
struct StepParams {
    instance: u64,
    #[serde(default = "one")]
    n: u64,
}

fn one() -> u64 {
    1
}

fn full_speed() -> f64 {
    1.0
}

#[derive(Deserialize)]
struct SetAnglesParams {
    instance: u64,
    robot: u64,
    names: Vec<String>,
    #[serde(alias = "targets")]
    angles: Vec<f64>,
    #[serde(default = "full_speed", alias = "fraction_max_speed")]
    fraction: f64,
}

#[derive(Deserialize)]
struct GetAnglesParams {
    instance: u64,
    robot: u64,
    #[serde(default)]
    names: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct PostureParams {
    instance: u64,
    robot: u64,
    posture: String,
    #[serde(default = "full_speed", alias = "fraction_max_speed")]
    fraction: f64,
}

#[derive(Deserialize)]
struct MoveParams {
    instance: u64,
    robot: u64,
    #[serde(default)]
    vx: f64,
    #[serde(default)]
    vy: f64,
    #[serde(default)]
    wz: f64,
}

#[derive(Deserialize)]
struct MoveToParams {
    instance: u64,
    robot: u64,
    x: f64,
    y: f64,
    #[serde(default)]
    theta: f64,
}

#[derive(Deserialize)]
struct LaserParams {
    instance: u64,
    robot: u64,
    laser: String,
}

#[derive(Deserialize)]
struct DepthParams {
    instance: u64,
    robot: u64,
    camera: String,
    #[serde(default)]
    resolution: Option<String>,
    #[serde(default)]
    width: Option<u32>,
    #[serde(default)]
    height: Option<u32>,
}

#[derive(Deserialize)]
struct CollisionParams {
    instance: u64,
    robot: u64,
    #[serde(default)]
    links: Vec<String>,
}

#[derive(Deserialize)]
struct PoseParams {
    #[serde(default)]
    xyz: [f64; 3],
    #[serde(default)]
    rpy: [f64; 3],
}

#[derive(Deserialize)]
struct StaticBodyParams {
    instance: u64,
    shape: Shape,
    #[serde(default)]
    pose: Option<PoseParams>,
}

#[derive(Deserialize)]
struct WorkspaceParams {
    model: String,
    chain: String,
    per_instance: usize,
    #[serde(default = "ten")]
    instances: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    mode: Option<String>,
    #[serde(default = "yes")]
    collision_check: bool,
    #[serde(default)]
    parallelism: usize,
    #[serde(default)]
    rejection_cap: Option<u64>,
    #[serde(default = "yes")]
    include_samples: bool,
}

fn ten() -> usize {
    10
}

fn yes() -> bool {
    true
}

fn done() -> Value {
    json!({"ok": true})
}

/// Dispatches protocol requests onto a registry. Every method is a thin
/// wrapper over the corresponding library operation.
#[derive(Debug, Default)]
pub struct Dispatcher {
    registry: Arc<Registry>,
    models: Mutex<HashMap<String, Arc<RobotAsset>>>,
}

impl Dispatcher {
    pub fn new(registry: Arc<Registry>) -> Self {
        Self {
            registry,
            models: Mutex::new(HashMap::new()),
        }
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    /// Bundled model name or URDF path (with optional sidecar), cached.
    pub fn load_model(&self, name: &str) -> Result<Arc<RobotAsset>, AssetError> {
        let mut cache = self.models.lock().unwrap_or_else(PoisonError::into_inner);
        if let Some(a) = cache.get(name) {
            return Ok(a.clone());
        }
        let asset = match RobotAsset::bundled(name) {
            Ok(a) => a,
            Err(AssetError::UnknownModel(_)) => RobotAsset::from_urdf_path(name)?,
            Err(e) => return Err(e),
        }
        .shared();
        cache.insert(name.to_string(), asset.clone());
        Ok(asset)
    }

    fn with<R>(&self, id: u64, f: impl FnOnce(&mut Instance) -> Result<R, SimError>) -> Result<R, Fault> {
        Ok(self.registry.with(id, f)??)
    }

    pub fn handle_request(&self, req: &Request) -> Response {
        let outcome = catch_unwind(AssertUnwindSafe(|| self.dispatch(&req.method, &req.params)));
        match outcome {
            Ok(Ok(v)) => Response::ok(req.id.clone(), v),
            Ok(Err(f)) => Response::err(req.id.clone(), f.code, f.message),
            Err(_) => Response::err(req.id.clone(), INTERNAL, "internal error"),
        }
    }

    /// Parses and handles one wire line.
    pub fn handle_line(&self, line: &str) -> Response {
        if line.len() > MAX_LINE_BYTES {
            return Response::err(Value::Null, INVALID_PARAMS, "request too large");
        }
        let value: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return Response::err(Value::Null, INVALID_PARAMS, format!("malformed JSON: {e}")),
        };
        let id = value.get("id").cloned().unwrap_or(Value::Null);
        match serde_json::from_value::<Request>(value) {
            Ok(req) => self.handle_request(&req),
            Err(e) => Response::err(id, INVALID_PARAMS, format!("invalid request: {e}")),
        }
    }

    fn dispatch(&self, method: &str, p: &Value) -> Result<Value, Fault> {
        match method {
            "create_instance" => {
                let cfg: InstanceConfig = params(p)?;
                Ok(json!({"instance": self.registry.create(cfg)?}))
            }
            "reset_instance" => {
                let r: InstanceRef = params(p)?;
                self.with(r.instance, |i| {
                    i.reset();
                    Ok(())
                })?;
                Ok(done())
            }
            "stop_instance" => {
                let r: InstanceRef = params(p)?;
                self.registry.stop(r.instance)?;
                Ok(done())
            }
            "spawn_robot" => {
                let s: SpawnParams = params(p)?;
                let asset = match (s.urdf, s.model) {
                    (Some(text), _) => RobotAsset::new(
                        crate::urdf::parse_urdf(&text).map_err(AssetError::from)?,
                        s.profile.unwrap_or_default(),
                    )?
                    .shared(),
                    (None, Some(name)) => self.load_model(&name)?,
                    (None, None) => return Err(Fault::new(INVALID_PARAMS, "invalid params: need `model` or `urdf`")),
                };
                let id = self.with(s.instance, |i| i.spawn_robot(asset, s.pose))?;
                Ok(json!({"robot": id}))
            }
            "remove_robot" => {
                let r: RobotRef = params(p)?;
                self.with(r.instance, |i| i.remove_robot(r.robot))?;
                Ok(done())
            }
            "step" => {
                let s: StepParams = params(p)?;
                if s.n == 0 {
                    return Err(Fault::new(INVALID_PARAMS, "invalid params: n must be positive"));
                }
                let (clock, steps) = self.with(s.instance, |i| {
                    i.step(s.n);
                    Ok((i.clock(), i.step_count()))
                })?;
                Ok(json!({"clock": clock, "steps": steps}))
            }
            "set_angles" => {
                let s: SetAnglesParams = params(p)?;
                self.with(s.instance, |i| i.set_angles(s.robot, &s.names, &s.angles, s.fraction))?;
                Ok(done())
            }
            "get_angles" => {
                let s: GetAnglesParams = params(p)?;
                let (names, angles) = self.with(s.instance, |i| {
                    let names = match s.names {
                        Some(n) => n,
                        None => i.robot(s.robot)?.asset().tree().movable_joints().to_vec(),
                    };
                    let a = i.get_angles(s.robot, &names)?;
                    Ok((names, a))
                })?;
                Ok(json!({"names": names, "angles": angles}))
            }
            "go_to_posture" => {
                let s: PostureParams = params(p)?;
                self.with(s.instance, |i| i.go_to_posture(s.robot, &s.posture, s.fraction))?;
                Ok(done())
            }
            "move" => {
                let s: MoveParams = params(p)?;
                self.with(s.instance, |i| i.move_base(s.robot, s.vx, s.vy, s.wz))?;
                Ok(done())
            }
            "move_to" => {
                let s: MoveToParams = params(p)?;
                self.with(s.instance, |i| i.move_to(s.robot, s.x, s.y, s.theta))?;
                Ok(done())
            }
            "is_move_finished" => {
                let r: RobotRef = params(p)?;
                let f = self.with(r.instance, |i| i.is_move_finished(r.robot))?;
                Ok(json!({"finished": f}))
            }
            "get_odometry" => {
                let r: RobotRef = params(p)?;
                let pose = self.with(r.instance, |i| i.get_odometry(r.robot))?;
                Ok(serde_json::to_value(pose).expect("pose serializes"))
            }
            "get_laser_scan" => {
                let s: LaserParams = params(p)?;
                let scan = self.with(s.instance, |i| get_laser_scan(i, s.robot, &s.laser))?;
                Ok(serde_json::to_value(scan).expect("scan serializes"))
            }
            "get_depth_image" => {
                let s: DepthParams = params(p)?;
                let res = match (s.resolution, s.width, s.height) {
                    (Some(r), _, _) => {
                        let (w, h) = r
                            .split_once(['x', 'X'])
                            .and_then(|(w, h)| Some((w.trim().parse().ok()?, h.trim().parse().ok()?)))
                            .ok_or_else(|| Fault::new(INVALID_PARAMS, format!("invalid params: bad resolution `{r}`")))?;
                        Resolution::from_dims(w, h)?
                    }
                    (None, Some(w), Some(h)) => Resolution::from_dims(w, h)?,
                    (None, None, None) => Resolution::Qvga,
                    _ => return Err(Fault::new(INVALID_PARAMS, "invalid params: need both width and height")),
                };
                let img = self.with(s.instance, |i| get_depth_image(i, s.robot, &s.camera, res))?;
                Ok(serde_json::to_value(img).expect("image serializes"))
            }
            "world_collision" => {
                let s: CollisionParams = params(p)?;
                let contacts = self.with(s.instance, |i| i.world_collision(s.robot, &s.links))?;
                Ok(json!({"contacts": contacts}))
            }
            "add_static_body" => {
                let s: StaticBodyParams = params(p)?;
                let pose = s.pose.map_or(Pose::identity(), |p| Pose::from_xyz_rpy(p.xyz, p.rpy));
                let id = self.with(s.instance, |i| i.add_static_body(s.shape, pose))?;
                Ok(json!({"body": id}))
            }
            "get_state_digest" => {
                let r: InstanceRef = params(p)?;
                let (digest, clock, steps) = self.with(r.instance, |i| Ok((i.digest(), i.clock(), i.step_count())))?;
                Ok(json!({"digest": digest, "clock": clock, "steps": steps}))
            }
            "sample_workspace" => {
                let s: WorkspaceParams = params(p)?;
                let mode = match s.mode.as_deref() {
                    None => JacobianMode::default(),
                    Some(m) => m.parse().map_err(|e: String| Fault::new(INVALID_PARAMS, e))?,
                };
                let asset = self.load_model(&s.model)?;
                let chain = resolve_chain(&asset, &s.chain)?;
                let opts = SampleOptions {
                    mode,
                    collision_check: s.collision_check,
                    audit: false,
                    parallelism: s.parallelism,
                    rejection_cap: s.rejection_cap.unwrap_or(DEFAULT_REJECTION_CAP),
                };
                let run = sample_workspace(&asset, &chain, s.per_instance, s.instances, s.seed, &opts)?;
                let mut cloud = normalize_workspace(run.cloud)?;
                let count = cloud.len();
                if !s.include_samples {
                    cloud.samples.clear();
                }
                Ok(json!({
                    "count": count,
                    "rejections_per_instance": run.rejections_per_instance,
                    "cloud": cloud,
                }))
            }
            other => Err(Fault::new(METHOD_NOT_FOUND, format!("method not found: {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(d: &Dispatcher, line: &str) -> Response {
        d.handle_line(line)
    }

    #[test]
    fn create_returns_first_id() {
        let d = Dispatcher::default();
        let r = call(&d, r#"{"id":1,"method":"create_instance","params":{"dt":0.0041666667,"seed":7}}"#);
        assert_eq!(r.to_line(), r#"{"id":1,"result":{"instance":1}}"#);
    }

    #[test]
    fn error_codes() {
        let d = Dispatcher::default();
        call(&d, r#"{"id":1,"method":"create_instance","params":{}}"#);
        let r = call(&d, r#"{"id":2,"method":"get_angles","params":{"instance":1,"robot":99,"names":["KneePitch"]}}"#);
        let e = r.error.unwrap();
        assert_eq!(e.code, 404);
        assert!(e.message.contains("unknown robot"));
        assert_eq!(call(&d, r#"{"id":3,"method":"no_such"}"#).error.unwrap().code, 405);
        let bad = call(&d, "{not json");
        assert_eq!((bad.id, bad.error.unwrap().code), (Value::Null, 400));
        assert_eq!(call(&d, r#"{"id":4,"method":"step","params":{"instance":"x"}}"#).error.unwrap().code, 400);
    }
}
