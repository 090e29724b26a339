use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::json;

use super::protocol::Dispatcher;
use super::scenario::{run_scenario, Scenario};
use super::server::Server;
use crate::assets::{AssetError, RobotAsset};
use crate::kinematics::{chain_fk, JacobianMode};
use crate::urdf::{parse_urdf, validate_model, Finding, Severity, UrdfError, ValidationReport};
use crate::workspace::{
    audit_cloud, export_cloud, normalize_jointly, normalize_workspace, resolve_chain, sample_workspace,
    ExportFormat, SampleOptions, WorkspaceCloud, DEFAULT_REJECTION_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "kinesim", version, about = "Headless URDF kinematic simulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a URDF; prints the report as JSON.
    Validate { urdf: PathBuf },
    /// Tip pose of a chain at the given joint values.
    Fk {
        urdf: PathBuf,
        /// `base,tip` link names or a named chain from the model sidecar.
        #[arg(long)]
        chain: String,
        /// Joint values base to tip; repeat or comma-separate.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..)]
        q: Vec<f64>,
    },
    /// Sample, normalize and export chain workspaces.
    Workspace {
        urdf: PathBuf,
        /// `base,tip` or a sidecar chain name; repeat for several chains.
        #[arg(long, required = true)]
        chain: Vec<String>,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long = "per-instance", default_value_t = 4000)]
        per_instance: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// PLY output; with several chains the tip link name is inserted before the extension.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value = "full6")]
        mode: JacobianMode,
        /// Normalize all chains against their common maximum.
        #[arg(long = "joint-normalization")]
        joint_normalization: bool,
        /// Worker threads (default: one per instance).
        #[arg(long, default_value_t = 0)]
        parallelism: usize,
        /// Skip self-collision rejection.
        #[arg(long = "no-collision")]
        no_collision: bool,
        #[arg(long = "rejection-cap", default_value_t = DEFAULT_REJECTION_CAP)]
        rejection_cap: u64,
        /// Replay every sample through kinematics and collision before writing.
        #[arg(long)]
        audit: bool,
    },
    /// Serve the line-delimited JSON protocol over TCP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        bind: String,
    },
    /// Replay a command script against a fresh instance.
    Scenario {
        script: PathBuf,
        /// Write the outcome JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure(i32, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_RUNTIME, e.to_string())
    }
}

/// Loads a URDF path, falling back to the bundled model of the same stem
/// when the path does not exist.
pub fn load_asset(path: &Path) -> Result<RobotAsset, AssetError> {
    if path.exists() {
        return RobotAsset::from_urdf_path(path);
    }
    match path.file_stem().and_then(|s| s.to_str()) {
        Some(stem) if RobotAsset::bundled_urdf(stem).is_some() => RobotAsset::bundled(stem),
        _ => Err(UrdfError::Io(format!("{}: no such file", path.display())).into()),
    }
}

fn read_urdf_text(path: &Path) -> Result<String, Failure> {
    match std::fs::read_to_string(path) {
        Ok(t) => Ok(t),
        Err(e) => path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(RobotAsset::bundled_urdf)
            .map(str::to_string)
            .ok_or_else(|| Failure(EXIT_RUNTIME, format!("{}: {e}", path.display()))),
    }
}

fn chain_output(path: &Path, tip: &str, many: bool) -> PathBuf {
    if !many {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}.{tip}.{ext}"),
        None => format!("{stem}.{tip}"),
    };
    path.with_file_name(name)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Validate { urdf } => {
            let text = read_urdf_text(&urdf)?;
            let report = match parse_urdf(&text) {
                Ok(model) => validate_model(&model),
                Err(e) => ValidationReport {
                    findings: vec![Finding {
                        severity: Severity::Error,
                        element: urdf.display().to_string(),
                        message: e.to_string(),
                    }],
                },
            };
            writeln!(out, "{}", report.to_json())?;
            Ok(if report.has_errors() { EXIT_INVALID } else { EXIT_OK })
        }
        Command::Fk { urdf, chain, q } => {
            let asset = load_asset(&urdf)?;
            let chain = resolve_chain(&asset, &chain)?;
            if q.len() != chain.dof() {
                return Err(Failure(
                    EXIT_USAGE,
                    format!("chain has {} joints, got {} values for --q", chain.dof(), q.len()),
                ));
            }
            for (j, &v) in chain.joints.iter().zip(&q) {
                if !j.limits.contains(v) {
                    return Err(Failure(
                        EXIT_RUNTIME,
                        format!("{} = {v} outside [{}, {}]", j.name, j.limits.lower, j.limits.upper),
                    ));
                }
            }
            let pose = chain_fk(&chain, &q)?;
            let doc = json!({
                "base": chain.base_link,
                "tip": chain.tip_link,
                "joints": chain.joint_names(),
                "q": q,
                "translation": pose.xyz(),
                "rpy": pose.rpy().map(|a| a + 0.0),
                "rotation": serde_json::to_value(pose)?["rotation"],
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(EXIT_OK)
        }
        Command::Workspace {
            urdf,
            chain,
            instances,
            per_instance,
            seed,
            out: ply,
            csv,
            mode,
            joint_normalization,
            parallelism,
            no_collision,
            rejection_cap,
            audit,
        } => {
            if instances == 0 || per_instance == 0 {
                return Err(Failure(EXIT_USAGE, "--instances and --per-instance must be positive".into()));
            }
            let asset = load_asset(&urdf)?;
            let opts = SampleOptions {
                mode,
                collision_check: !no_collision,
                audit: false,
                parallelism,
                rejection_cap,
            };
            let mut clouds: Vec<WorkspaceCloud> = Vec::new();
            let mut rejections = Vec::new();
            for name in &chain {
                let c = resolve_chain(&asset, name)?;
                let run = sample_workspace(&asset, &c, per_instance, instances, seed, &opts)?;
                rejections.push(run.rejections_per_instance.iter().sum::<u64>());
                clouds.push(run.cloud);
            }
            let clouds = if joint_normalization {
                normalize_jointly(clouds)?
            } else {
                clouds.into_iter().map(normalize_workspace).collect::<Result<_, _>>()?
            };
            let many = clouds.len() > 1;
            let mut summary = Vec::new();
            for (cloud, rejected) in clouds.iter().zip(rejections) {
                if audit {
                    let report = audit_cloud(&asset, cloud)?;
                    if !report.passed() {
                        return Err(Failure(
                            EXIT_RUNTIME,
                            format!("audit failed for {}: {}", cloud.chain_id(), serde_json::to_string(&report)?),
                        ));
                    }
                }
                let ply_path = chain_output(&ply, &cloud.tip_link, many);
                export_cloud(cloud, ExportFormat::Ply, &ply_path)?;
                let csv_path = csv.as_ref().map(|p| chain_output(p, &cloud.tip_link, many));
                if let Some(p) = &csv_path {
                    export_cloud(cloud, ExportFormat::Csv, p)?;
                }
                summary.push(json!({
                    "chain": cloud.chain_id(),
                    "samples": cloud.len(),
                    "rejected": rejected,
                    "max_w_raw": cloud.max_w_raw(),
                    "ply": ply_path,
                    "csv": csv_path,
                    "audited": audit,
                }));
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
            Ok(EXIT_OK)
        }
        Command::Serve { bind } => {
            let server = Server::bind(bind.as_str(), Arc::new(Dispatcher::default()))?;
            writeln!(out, "listening on {}", server.local_addr()?)?;
            out.flush()?;
            server.run()?;
            Ok(EXIT_OK)
        }
        Command::Scenario { script, out: dest } => {
            let text = std::fs::read_to_string(&script).map_err(|e| format!("{}: {e}", script.display()))?;
            let scenario = Scenario::from_json(&text).map_err(|e| Failure(EXIT_USAGE, format!("bad script: {e}")))?;
            let dispatcher = Dispatcher::default();
            let outcome = run_scenario(&scenario, &dispatcher, script.parent())?;
            let doc = serde_json::to_string_pretty(&outcome)?;
            match dest {
                Some(p) => std::fs::write(&p, doc + "\n").map_err(|e| format!("{}: {e}", p.display()))?,
                None => writeln!(out, "{doc}")?,
            }
            Ok(if outcome.failures == 0 { EXIT_OK } else { EXIT_RUNTIME })
        }
    }
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn cli_main_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

pub fn cli_main<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    cli_main_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
