//! Samples the right- and left-arm workspaces of the bundled Pepper-like
//! model, normalizes each chain and writes colored PLY clouds.
//!
//!     cargo run --example workspace_sampling -- [per_instance] [out_dir]

use std::time::Instant;

use kinesim::assets::RobotAsset;
use kinesim::workspace::{
    audit_cloud, export_cloud, normalize_workspace, resolve_chain, sample_workspace, ExportFormat, SampleOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let per_instance: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4000);
    let out_dir = args.next().unwrap_or_else(|| ".".to_string());

    let asset = RobotAsset::bundled("pepper_simple")?;
    for arm in ["right_arm", "left_arm"] {
        let chain = resolve_chain(&asset, arm)?;
        let t0 = Instant::now();
        let run = sample_workspace(&asset, &chain, per_instance, 10, 42, &SampleOptions::default())?;
        let rejected: u64 = run.rejections_per_instance.iter().sum();
        let cloud = normalize_workspace(run.cloud)?;
        let elapsed = t0.elapsed();
        let audit = audit_cloud(&asset, &cloud)?;
        let path = format!("{out_dir}/{arm}.ply");
        export_cloud(&cloud, ExportFormat::Ply, &path)?;
        println!(
            "{arm}: {} samples, {rejected} rejected, {:.2?}, audit {}, wrote {path}",
            cloud.len(),
            elapsed,
            if audit.passed() { "ok" } else { "FAILED" },
        );
    }
    Ok(())
}
