use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Provenance, WorkspaceCloud, WorkspaceError, WorkspaceSample, ADJACENCY_RULE, VERSION};
use crate::assets::{RobotAsset, STAND};
use crate::kinematics::{chain_fk, manipulability, Configuration, JacobianMode};
use crate::urdf::KinematicChain;

pub const DEFAULT_REJECTION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    pub mode: JacobianMode,
    pub collision_check: bool,
    /// Record every rejected configuration with its colliding pairs.
    pub audit: bool,
    /// Worker threads; 0 runs one per instance.
    pub parallelism: usize,
    /// Consecutive rejections after which an instance gives up.
    pub rejection_cap: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            mode: JacobianMode::Full6,
            collision_check: true,
            audit: false,
            parallelism: 0,
            rejection_cap: DEFAULT_REJECTION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rejection {
    pub instance: usize,
    /// Whole-model configuration that was rejected.
    pub configuration: Configuration,
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRun {
    pub cloud: WorkspaceCloud,
    /// Total rejections per instance.
    pub rejections_per_instance: Vec<u64>,
    /// Populated only with [`SampleOptions::audit`].
    pub rejections: Vec<Rejection>,
}

struct InstanceRun {
    samples: Vec<WorkspaceSample>,
    rejected: u64,
    log: Vec<Rejection>,
}

pub(crate) fn chain_dof_indices(asset: &RobotAsset, chain: &KinematicChain) -> Result<Vec<usize>, WorkspaceError> {
    chain
        .joints
        .iter()
        .map(|j| {
            asset
                .tree()
                .dof_index(&j.name)
                .ok_or_else(|| WorkspaceError::UnknownChain(j.name.clone()))
        })
        .collect()
}

/// Rejection-samples `per_instance_target` collision-free configurations of
/// `chain` in each of `n_instances` independent streams. Stream `i` is
/// ChaCha8 seeded with `seed`, stream id `i`; joint values are uniform within
/// limits (continuous joints over [−π, π)); non-chain joints rest at the
/// `Stand` posture. Results are concatenated in instance order.
pub fn sample_workspace(
    asset: &RobotAsset,
    chain: &KinematicChain,
    per_instance_target: usize,
    n_instances: usize,
    seed: u64,
    options: &SampleOptions,
) -> Result<SampleRun, WorkspaceError> {
    if chain.dof() == 0 {
        return Err(WorkspaceError::ZeroDof(format!("{},{}", chain.base_link, chain.tip_link)));
    }
    if per_instance_target == 0 || n_instances == 0 {
        return Err(WorkspaceError::InvalidCount);
    }
    let indices = chain_dof_indices(asset, chain)?;
    let threads = if options.parallelism == 0 {
        n_instances
    } else {
        options.parallelism
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| WorkspaceError::Parallelism(e.to_string()))?;

    let runs: Vec<Result<InstanceRun, WorkspaceError>> = pool.install(|| {
        (0..n_instances)
            .into_par_iter()
            .map(|i| run_instance(asset, chain, &indices, i, per_instance_target, seed, options))
            .collect()
    });

    let mut samples = Vec::with_capacity(per_instance_target * n_instances);
    let mut rejections_per_instance = Vec::with_capacity(n_instances);
    let mut rejections = Vec::new();
    for run in runs {
        let run = run?;
        samples.extend(run.samples);
        rejections_per_instance.push(run.rejected);
        rejections.extend(run.log);
    }

    let chain_id = format!("{},{}", chain.base_link, chain.tip_link);
    let provenance = Provenance {
        seed,
        n_instances,
        per_instance_target,
        chain: chain_id,
        mode: options.mode,
        model_sha256: asset.sha256().to_string(),
        adjacency_rule: ADJACENCY_RULE.to_string(),
        version: VERSION.to_string(),
        sampling: "uniform within joint limits".to_string(),
        rest_posture: if asset.posture(STAND).is_some() { STAND } else { "zeros" }.to_string(),
        collision_check: options.collision_check,
    };
    Ok(SampleRun {
        cloud: WorkspaceCloud {
            base_link: chain.base_link.clone(),
            tip_link: chain.tip_link.clone(),
            joint_names: chain.joints.iter().map(|j| j.name.clone()).collect(),
            mode: options.mode,
            model_sha256: asset.sha256().to_string(),
            samples,
            provenance: vec![provenance],
            normalization: None,
        },
        rejections_per_instance,
        rejections,
    })
}

fn run_instance(
    asset: &RobotAsset,
    chain: &KinematicChain,
    indices: &[usize],
    instance: usize,
    target: usize,
    seed: u64,
    options: &SampleOptions,
) -> Result<InstanceRun, WorkspaceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance as u64);
    let ranges: Vec<(f64, f64)> = chain.joints.iter().map(|j| j.limits.sampling_range()).collect();
    let checker = asset.self_collision_checker();
    let mut full = asset.rest_vector();
    let mut q = vec![0.0; chain.dof()];
    let mut out = InstanceRun {
        samples: Vec::with_capacity(target),
        rejected: 0,
        log: Vec::new(),
    };
    let mut consecutive = 0u64;

    while out.samples.len() < target {
        for (v, &(lo, hi)) in q.iter_mut().zip(&ranges) {
            *v = lo + (hi - lo) * rng.random::<f64>();
        }
        for (&i, &v) in indices.iter().zip(&q) {
            full[i] = v;
        }
        if options.collision_check && checker.any_collision(&full)? {
            out.rejected += 1;
            consecutive += 1;
            if options.audit {
                out.log.push(Rejection {
                    instance,
                    configuration: asset
                        .tree()
                        .movable_joints()
                        .iter()
                        .cloned()
                        .zip(full.iter().copied())
                        .collect(),
                    pairs: checker.check(&full)?,
                });
            }
            if consecutive >= options.rejection_cap {
                return Err(WorkspaceError::Unsatisfiable {
                    instance,
                    cap: options.rejection_cap,
                });
            }
            continue;
        }
        consecutive = 0;
        let p = chain_fk(chain, &q)?.translation;
        out.samples.push(WorkspaceSample {
            position: [p.x, p.y, p.z],
            q: q.clone(),
            w_raw: manipulability(chain, &q, options.mode)?,
            w_norm: None,
        });
    }
    Ok(out)
}
