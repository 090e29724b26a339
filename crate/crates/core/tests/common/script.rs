//! Recorded command scripts and a direct in-process replayer that bypasses
//! the protocol dispatcher.

use std::sync::Arc;

use kinesim::assets::RobotAsset;
use kinesim::collision::Shape;
use kinesim::math::Pose;
use kinesim::sensors::{get_depth_image, get_laser_scan, Resolution};
use kinesim::sim::{Instance, Pose2D};
use rand::Rng;
use serde_json::{json, Value};

/// A random but always-valid script of `len` commands for one pepper robot
/// (robot id 1) in a fresh instance. Instance ids are not included.
pub fn recorded_script(seed: u64, len: usize) -> Vec<(String, Value)> {
    let mut rng = super::rng(seed);
    let asset = RobotAsset::bundled("pepper_simple").unwrap();
    let names = asset.tree().movable_joints().to_vec();
    let limits: Vec<_> = names.iter().map(|n| asset.model.joint(n).unwrap().limits.unwrap()).collect();
    let mut out = vec![
        ("spawn_robot".to_string(), json!({"model": "pepper_simple", "pose": {"x": 0.5, "y": -0.25, "theta": 0.3}})),
        (
            "add_static_body".to_string(),
            json!({"shape": {"kind": "box", "half_extents": [0.1, 2.0, 1.0]}, "pose": {"xyz": [3.0, 0.0, 1.0]}}),
        ),
    ];
    while out.len() < len {
        let cmd = match rng.random_range(0..10) {
            0..=2 => {
                let k = rng.random_range(1..=4);
                let picked: Vec<usize> = (0..k).map(|_| rng.random_range(0..names.len())).collect();
                let ns: Vec<&str> = picked.iter().map(|&i| names[i].as_str()).collect();
                let ts: Vec<f64> = picked.iter().map(|&i| rng.random_range(limits[i].lower..=limits[i].upper)).collect();
                ("set_angles", json!({"robot": 1, "names": ns, "angles": ts, "fraction": rng.random_range(0.05..=1.0)}))
            }
            3 | 4 => ("step", json!({"n": rng.random_range(1..40)})),
            5 => {
                let p = ["Stand", "StandZero", "Crouch"][rng.random_range(0..3)];
                ("go_to_posture", json!({"robot": 1, "posture": p, "fraction": rng.random_range(0.1..=1.0)}))
            }
            6 => ("move", json!({"robot": 1, "vx": rng.random_range(-0.2..0.2), "vy": rng.random_range(-0.2..0.2), "wz": rng.random_range(-0.9..0.9)})),
            7 => ("move_to", json!({"robot": 1, "x": rng.random_range(-1.0..1.0), "y": rng.random_range(-1.0..1.0), "theta": rng.random_range(-4.0..4.0)})),
            8 => {
                let laser = ["front", "left", "right"][rng.random_range(0..3)];
                ("get_laser_scan", json!({"robot": 1, "laser": laser}))
            }
            _ => ("get_odometry", json!({"robot": 1})),
        };
        out.push((cmd.0.to_string(), cmd.1));
    }
    out
}

fn f(v: &Value, k: &str) -> f64 {
    v[k].as_f64().unwrap()
}

/// Applies one scripted command through the library API.
pub fn apply(inst: &mut Instance, method: &str, p: &Value) {
    let robot = p.get("robot").and_then(Value::as_u64).unwrap_or(0);
    match method {
        "spawn_robot" => {
            let asset = Arc::new(RobotAsset::bundled(p["model"].as_str().unwrap()).unwrap());
            let pose = Pose2D::new(f(&p["pose"], "x"), f(&p["pose"], "y"), f(&p["pose"], "theta"));
            inst.spawn_robot(asset, pose).unwrap();
        }
        "add_static_body" => {
            let shape: Shape = serde_json::from_value(p["shape"].clone()).unwrap();
            let xyz: [f64; 3] = serde_json::from_value(p["pose"]["xyz"].clone()).unwrap();
            inst.add_static_body(shape, Pose::from_xyz_rpy(xyz, [0.0; 3])).unwrap();
        }
        "set_angles" => {
            let names: Vec<String> = serde_json::from_value(p["names"].clone()).unwrap();
            let angles: Vec<f64> = serde_json::from_value(p["angles"].clone()).unwrap();
            inst.set_angles(robot, &names, &angles, f(p, "fraction")).unwrap();
        }
        "step" => inst.step(p["n"].as_u64().unwrap()),
        "go_to_posture" => inst.go_to_posture(robot, p["posture"].as_str().unwrap(), f(p, "fraction")).unwrap(),
        "move" => inst.move_base(robot, f(p, "vx"), f(p, "vy"), f(p, "wz")).unwrap(),
        "move_to" => inst.move_to(robot, f(p, "x"), f(p, "y"), f(p, "theta")).unwrap(),
        "get_laser_scan" => {
            get_laser_scan(inst, robot, p["laser"].as_str().unwrap()).unwrap();
        }
        "get_depth_image" => {
            get_depth_image(inst, robot, p["camera"].as_str().unwrap(), Resolution::Qqvga).unwrap();
        }
        "get_odometry" => {
            inst.get_odometry(robot).unwrap();
        }
        other => panic!("script method {other} has no direct mapping"),
    }
}
