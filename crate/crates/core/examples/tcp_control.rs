//! Starts the line-delimited JSON server on an ephemeral port and drives an
//! instance through it from a client on the same process.

use std::sync::Arc;

use kinesim::interface::{Client, Dispatcher, Server};
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let server = Server::bind("127.0.0.1:0", Arc::new(Dispatcher::default()))?.spawn()?;
    println!("serving on {}", server.addr());

    let mut client = Client::connect(server.addr())?;
    let calls = [
        ("create_instance", json!({"seed": 7})),
        ("spawn_robot", json!({"instance": 1, "model": "nao_simple", "pose": {"x": 0.0, "y": 0.0, "theta": 0.0}})),
        ("set_angles", json!({"instance": 1, "robot": 1, "names": ["HeadYaw"], "angles": [0.5], "fraction": 0.5})),
        ("move", json!({"instance": 1, "robot": 1, "vx": 0.1})),
        ("step", json!({"instance": 1, "n": 240})),
        ("get_angles", json!({"instance": 1, "robot": 1, "names": ["HeadYaw"]})),
        ("get_odometry", json!({"instance": 1, "robot": 1})),
        ("get_state_digest", json!({"instance": 1})),
        ("no_such_method", json!({})),
    ];
    for (id, (method, params)) in calls.into_iter().enumerate() {
        let resp = client.call(id as u64, method, params)?;
        println!("> {method}\n< {}", resp.to_line());
    }
    server.shutdown();
    Ok(())
}
