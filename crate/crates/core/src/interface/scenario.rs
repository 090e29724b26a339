use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::protocol::{Dispatcher, Request, Response};
use crate::assets::RobotAsset;
use crate::sim::InstanceConfig;

/// A recorded command script replayed against a fresh instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub config: InstanceConfig,
    pub commands: Vec<ScenarioCommand>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioCommand {
    pub method: String,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub config: InstanceConfig,
    pub joint_motion_model: String,
    pub responses: Vec<Response>,
    pub failures: usize,
    pub steps: u64,
    pub clock: f64,
    pub digest: String,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Replays `scenario` on a new instance of `dispatcher`'s registry. Commands
/// without an `instance` parameter target that instance; relative model
/// paths resolve against `base_dir`. Failed commands are recorded and the
/// replay continues.
pub fn run_scenario(scenario: &Scenario, dispatcher: &Dispatcher, base_dir: Option<&Path>) -> Result<ScenarioOutcome, String> {
    let instance = dispatcher
        .registry()
        .create(scenario.config)
        .map_err(|e| e.to_string())?;
    let mut responses = Vec::with_capacity(scenario.commands.len());
    for (k, cmd) in scenario.commands.iter().enumerate() {
        let mut params = if cmd.params.is_null() { json!({}) } else { cmd.params.clone() };
        if let Some(obj) = params.as_object_mut() {
            if cmd.method != "create_instance" && cmd.method != "sample_workspace" {
                obj.entry("instance").or_insert(json!(instance));
            }
            if let (Some(dir), Some(Value::String(m))) = (base_dir, obj.get_mut("model")) {
                if RobotAsset::bundled_urdf(m).is_none() && Path::new(m.as_str()).is_relative() {
                    *m = dir.join(m.as_str()).to_string_lossy().into_owned();
                }
            }
        }
        let req = Request::new(k as u64 + 1, &cmd.method, params);
        responses.push(dispatcher.handle_request(&req));
    }
    let (digest, clock, steps) = dispatcher
        .registry()
        .with(instance, |i| (i.digest(), i.clock(), i.step_count()))
        .map_err(|e| format!("scenario stopped its own instance: {e}"))?;
    dispatcher.registry().stop(instance).map_err(|e| e.to_string())?;
    Ok(ScenarioOutcome {
        config: scenario.config,
        joint_motion_model: "constant_speed".to_string(),
        failures: responses.iter().filter(|r| r.error.is_some()).count(),
        responses,
        steps,
        clock,
        digest,
    })
}
