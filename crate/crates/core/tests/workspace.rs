mod common;

use kinesim::assets::RobotAsset;
use kinesim::collision::self_collision;
use kinesim::kinematics::{chain_fk, Configuration, JacobianMode};
use kinesim::workspace::{
    audit_cloud, color_for, export_cloud, merge_clouds, normalize_jointly, normalize_workspace, resolve_chain,
    sample_workspace, to_csv_string, to_ply_string, ExportFormat, SampleOptions, WorkspaceCloud, WorkspaceError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pepper() -> RobotAsset {
    RobotAsset::bundled("pepper_simple").unwrap()
}

fn run(asset: &RobotAsset, chain: &str, per: usize, n: usize, seed: u64, opts: &SampleOptions) -> WorkspaceCloud {
    let c = resolve_chain(asset, chain).unwrap();
    sample_workspace(asset, &c, per, n, seed, opts).unwrap().cloud
}

#[test]
fn counts_normalization_and_audit() {
    let asset = pepper();
    for arm in ["right_arm", "left_arm"] {
        let c = resolve_chain(&asset, arm).unwrap();
        let r = sample_workspace(&asset, &c, 40, 10, 42, &SampleOptions::default()).unwrap();
        assert_eq!(r.cloud.len(), 400);
        assert_eq!(r.rejections_per_instance.len(), 10);
        let cloud = normalize_workspace(r.cloud).unwrap();
        let max = cloud.samples.iter().map(|s| s.w_norm.unwrap()).fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        assert!(cloud.samples.iter().all(|s| s.w_norm.unwrap() > 0.0 && s.w_norm.unwrap() <= 1.0));
        let report = audit_cloud(&asset, &cloud).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checked, 400);
    }
}

#[test]
fn one_joint_arm_never_rejects() {
    let asset = RobotAsset::bundled("two_link").unwrap();
    let c = resolve_chain(&asset, "base,tip").unwrap();
    let r = sample_workspace(&asset, &c, 5, 1, 0, &SampleOptions::default()).unwrap();
    assert_eq!(r.cloud.len(), 5);
    assert_eq!(r.rejections_per_instance, vec![0]);
}

#[test]
fn streams_follow_the_documented_derivation() {
    // Stream i: ChaCha8 from the seed, stream id i, one uniform draw per chain joint.
    let asset = pepper();
    let chain = resolve_chain(&asset, "right_arm").unwrap();
    let opts = SampleOptions { collision_check: false, ..Default::default() };
    let cloud = run(&asset, "right_arm", 3, 4, 99, &opts);
    for i in 0..4 {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        rng.set_stream(i as u64);
        for k in 0..3 {
            let q: Vec<f64> = chain
                .joints
                .iter()
                .map(|j| {
                    let (lo, hi) = j.limits.sampling_range();
                    lo + (hi - lo) * rng.random::<f64>()
                })
                .collect();
            let s = &cloud.samples[i * 3 + k];
            assert_eq!(s.q, q);
            let p = chain_fk(&chain, &q).unwrap().translation;
            assert_eq!(s.position, [p.x, p.y, p.z]);
        }
    }
}

#[test]
fn collision_checked_samples_are_the_free_subsequence() {
    let asset = pepper();
    let chain = resolve_chain(&asset, "left_arm").unwrap();
    let unchecked = run(&asset, "left_arm", 300, 2, 5, &SampleOptions { collision_check: false, ..Default::default() });
    let checked = run(&asset, "left_arm", 20, 2, 5, &SampleOptions::default());
    let model = &asset.model;
    let rest = asset.rest_vector();
    let names = asset.tree().movable_joints();
    let is_free = |q: &[f64]| {
        let mut cfg: Configuration = names.iter().cloned().zip(rest.iter().copied()).collect();
        for (j, &v) in chain.joints.iter().zip(q) {
            cfg.set(j.name.clone(), v);
        }
        self_collision(model, &cfg, &asset.profile.ignore_pairs).unwrap().is_empty()
    };
    for i in 0..2 {
        let free: Vec<_> = unchecked.samples[i * 300..(i + 1) * 300]
            .iter()
            .filter(|s| is_free(&s.q))
            .take(20)
            .collect();
        assert_eq!(free.len(), 20);
        for (a, b) in free.iter().zip(&checked.samples[i * 20..(i + 1) * 20]) {
            assert_eq!(&a.q, &b.q);
        }
    }
}

#[test]
fn rejections_are_logged_with_their_pairs() {
    let asset = pepper();
    let chain = resolve_chain(&asset, "right_arm").unwrap();
    let opts = SampleOptions { audit: true, ..Default::default() };
    let r = sample_workspace(&asset, &chain, 30, 3, 1, &opts).unwrap();
    assert_eq!(r.rejections.len() as u64, r.rejections_per_instance.iter().sum::<u64>());
    assert!(!r.rejections.is_empty(), "the arm should hit the torso sometimes");
    for rej in &r.rejections {
        let pairs = self_collision(&asset.model, &rej.configuration, &asset.profile.ignore_pairs).unwrap();
        assert!(!pairs.is_empty());
        assert_eq!(pairs, rej.pairs);
    }
}

#[test]
fn determinism_across_runs_and_parallelism() {
    let asset = pepper();
    let outputs: Vec<(String, String)> = [0, 1, 4, 1, 10]
        .into_iter()
        .map(|p| {
            let opts = SampleOptions { parallelism: p, ..Default::default() };
            let cloud = normalize_workspace(run(&asset, "right_arm", 25, 10, 7, &opts)).unwrap();
            (to_ply_string(&cloud).unwrap(), to_csv_string(&cloud).unwrap())
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let other = normalize_workspace(run(&asset, "right_arm", 25, 10, 8, &SampleOptions::default())).unwrap();
    assert_ne!(to_ply_string(&other).unwrap(), outputs[0].0);
}

#[test]
fn sampling_errors() {
    let asset = pepper();
    let chain = resolve_chain(&asset, "right_arm").unwrap();
    let opts = SampleOptions::default();
    assert_eq!(sample_workspace(&asset, &chain, 0, 1, 0, &opts).unwrap_err(), WorkspaceError::InvalidCount);
    assert_eq!(sample_workspace(&asset, &chain, 1, 0, 0, &opts).unwrap_err(), WorkspaceError::InvalidCount);
    let fixed = resolve_chain(&asset, "Tibia,Tibia").unwrap();
    assert!(matches!(sample_workspace(&asset, &fixed, 1, 1, 0, &opts), Err(WorkspaceError::ZeroDof(_))));
    assert!(matches!(resolve_chain(&asset, "nope"), Err(WorkspaceError::UnknownChain(_))));

    // Two big spheres two links apart always overlap.
    let stuck = RobotAsset::from_urdf_str(
        r#"<robot name="stuck">
          <link name="a"><collision><geometry><sphere radius="1"/></geometry></collision></link>
          <link name="b"/>
          <link name="c"><collision><geometry><sphere radius="1"/></geometry></collision></link>
          <joint name="j1" type="revolute"><parent link="a"/><child link="b"/><axis xyz="0 0 1"/>
            <limit lower="-1" upper="1" velocity="1" effort="1"/></joint>
          <joint name="j2" type="revolute"><parent link="b"/><child link="c"/><axis xyz="0 0 1"/>
            <limit lower="-1" upper="1" velocity="1" effort="1"/></joint>
        </robot>"#,
        None,
    )
    .unwrap();
    let chain = resolve_chain(&stuck, "a,c").unwrap();
    let opts = SampleOptions { rejection_cap: 50, ..Default::default() };
    assert_eq!(
        sample_workspace(&stuck, &chain, 1, 2, 0, &opts).unwrap_err(),
        WorkspaceError::Unsatisfiable { instance: 0, cap: 50 }
    );
}

#[test]
fn normalization_rules() {
    let asset = pepper();
    let opts = SampleOptions::default();
    let one = normalize_workspace(run(&asset, "right_arm", 1, 1, 3, &opts)).unwrap();
    assert_eq!(one.samples[0].w_norm, Some(1.0));

    let mut empty = run(&asset, "right_arm", 1, 1, 3, &opts);
    empty.samples.clear();
    assert_eq!(normalize_workspace(empty).unwrap_err(), WorkspaceError::Empty);

    let mut flat = run(&asset, "right_arm", 5, 1, 3, &opts);
    flat.samples.iter_mut().for_each(|s| s.w_raw = 0.0);
    assert_eq!(normalize_workspace(flat).unwrap_err(), WorkspaceError::Degenerate);

    let right = run(&asset, "right_arm", 20, 2, 3, &opts);
    let left = run(&asset, "left_arm", 20, 2, 3, &opts);
    let joint = normalize_jointly(vec![right.clone(), left.clone()]).unwrap();
    let top = right.max_w_raw().max(left.max_w_raw());
    for (raw, norm) in [(&right, &joint[0]), (&left, &joint[1])] {
        for (a, b) in raw.samples.iter().zip(&norm.samples) {
            assert_eq!(b.w_norm, Some(a.w_raw / top));
        }
    }
    let peak = joint.iter().flat_map(|c| &c.samples).map(|s| s.w_norm.unwrap()).fold(0.0, f64::max);
    assert_eq!(peak, 1.0);
}

#[test]
fn merging() {
    let asset = pepper();
    let opts = SampleOptions::default();
    let parts: Vec<WorkspaceCloud> = (0..3).map(|s| run(&asset, "right_arm", 10, 2, s, &opts)).collect();
    let merged = merge_clouds(parts.clone()).unwrap();
    assert_eq!(merged.len(), 60);
    assert_eq!(merged.provenance.len(), 3);
    let concat: Vec<_> = parts.iter().flat_map(|p| p.samples.clone()).collect();
    assert_eq!(merged.samples, concat);
    assert_eq!(merge_clouds(vec![parts[0].clone()]).unwrap(), parts[0]);

    let left = run(&asset, "left_arm", 10, 2, 0, &opts);
    assert!(matches!(merge_clouds(vec![parts[0].clone(), left]), Err(WorkspaceError::Mismatch(_))));
    let pos3 = run(&asset, "right_arm", 10, 2, 0, &SampleOptions { mode: JacobianMode::Position3, ..opts });
    assert!(matches!(merge_clouds(vec![parts[0].clone(), pos3]), Err(WorkspaceError::Mismatch(_))));
    let normalized = normalize_workspace(parts[1].clone()).unwrap();
    assert_eq!(merge_clouds(vec![parts[0].clone(), normalized]).unwrap_err(), WorkspaceError::AlreadyNormalized);
    assert_eq!(merge_clouds(vec![]).unwrap_err(), WorkspaceError::Empty);

    let header = to_csv_string(&normalize_workspace(merged).unwrap()).unwrap();
    assert!(header.contains("# part0.seed: 0") && header.contains("# part2.seed: 2"));
}

#[test]
fn exports() {
    let asset = pepper();
    let raw = run(&asset, "right_arm", 30, 2, 11, &SampleOptions::default());
    assert_eq!(to_ply_string(&raw).unwrap_err(), WorkspaceError::Unnormalized);
    let cloud = normalize_workspace(raw).unwrap();

    let ply = to_ply_string(&cloud).unwrap();
    let (head, body) = ply.split_once("end_header\n").unwrap();
    assert!(head.starts_with("ply\nformat ascii 1.0\n"));
    assert!(head.contains("element vertex 60\n"));
    for key in ["seed", "n_instances", "per_instance_target", "chain", "mode", "model_sha256", "adjacency_rule", "version"] {
        assert!(head.contains(&format!("comment {key}: ")), "missing {key}");
    }
    let rows: Vec<Vec<&str>> = body.lines().map(|l| l.split(' ').collect()).collect();
    assert_eq!(rows.len(), 60);
    let w: Vec<f64> = cloud.samples.iter().map(|s| s.w_norm.unwrap()).collect();
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    for (row, (s, &wn)) in rows.iter().zip(cloud.samples.iter().zip(&w)) {
        let xyz: Vec<f64> = row[..3].iter().map(|v| v.parse().unwrap()).collect();
        assert_eq!(xyz, s.position);
        let rgb: Vec<u8> = row[3..].iter().map(|v| v.parse().unwrap()).collect();
        if wn == 1.0 {
            assert_eq!(rgb, [0, 255, 0]);
        }
        if wn == min {
            assert_eq!(rgb, [255, 0, 0]);
        }
        // Linear red→green ramp between the observed minimum and 1.0.
        let t = (wn - min) / (1.0 - min);
        assert!((rgb[1] as f64 - 255.0 * t).abs() <= 0.5 + 1e-9);
        assert_eq!(rgb[0] as u16 + rgb[1] as u16, 255);
    }
    assert_eq!(color_for(1.0, min), [0, 255, 0]);

    let csv = to_csv_string(&cloud).unwrap();
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 61);
    let cols = 3 + cloud.joint_names.len() + 2;
    assert_eq!(data[0], "x,y,z,q1,q2,q3,q4,q5,q6,q7,q8,w_raw,w_norm");
    assert!(data.iter().all(|l| l.split(',').count() == cols));

    let dir = tempfile::tempdir().unwrap();
    export_cloud(&cloud, ExportFormat::Ply, dir.path().join("a.ply")).unwrap();
    assert_eq!(std::fs::read_to_string(dir.path().join("a.ply")).unwrap(), ply);
    let bad = dir.path().join("missing").join("a.csv");
    assert!(matches!(export_cloud(&cloud, ExportFormat::Csv, bad), Err(WorkspaceError::Io(_))));
}
