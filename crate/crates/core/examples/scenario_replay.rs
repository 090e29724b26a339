//! Replays a recorded command script twice and checks both runs end in the
//! same state digest.
//!
//!     cargo run --example scenario_replay -- [script.json]

use std::path::Path;

use kinesim::interface::{run_scenario, Dispatcher, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/scenario.json").to_string());
    let scenario = Scenario::from_json(&std::fs::read_to_string(&path)?)?;
    let base = Path::new(&path).parent();

    let first = run_scenario(&scenario, &Dispatcher::default(), base)?;
    let second = run_scenario(&scenario, &Dispatcher::default(), base)?;
    for (cmd, resp) in scenario.commands.iter().zip(&first.responses) {
        let line = resp.to_line();
        let short: String = line.chars().take(100).collect();
        println!("{:<16} {short}{}", cmd.method, if line.len() > 100 { "..." } else { "" });
    }
    println!("{} failures, {} steps, clock {:.4} s", first.failures, first.steps, first.clock);
    println!("digest {}", first.digest);
    println!("second run identical: {}", first == second);
    Ok(())
}
