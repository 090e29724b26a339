mod common;

use std::sync::Arc;

use kinesim::assets::RobotAsset;
use kinesim::collision::Shape;
use kinesim::math::Pose;
use kinesim::sensors::{get_depth_image, get_laser_scan, DepthImage, LaserScan, Resolution};
use kinesim::sim::{Instance, InstanceConfig, Pose2D, SimError};
use nalgebra::Vector3;
use rand::Rng;

fn pepper() -> Arc<RobotAsset> {
    RobotAsset::bundled("pepper_simple").unwrap().shared()
}

/// Pepper in an instance without ground plane, posed at `base`.
fn scene(base: Pose2D) -> (Instance, u64) {
    let mut inst = Instance::new(1, InstanceConfig { ground_plane: false, ..Default::default() }).unwrap();
    let r = inst.spawn_robot(pepper(), base).unwrap();
    (inst, r)
}

fn camera_frame(inst: &Instance, robot: u64) -> Pose {
    let state = inst.robot(robot).unwrap();
    let spec = state.asset().camera("depth").unwrap();
    state.link_pose(&spec.link).unwrap().compose(&spec.mount())
}

#[test]
fn empty_world_reports_misses() {
    let (inst, r) = scene(Pose2D::default());
    for id in ["front", "left", "right"] {
        let scan = get_laser_scan(&inst, r, id).unwrap();
        assert_eq!(scan.angles.len(), scan.ranges.len());
        assert!(scan.ranges.iter().all(|d| *d == f64::INFINITY), "{id}");
    }
    let img = get_depth_image(&inst, r, "depth", Resolution::Qqvga).unwrap();
    assert_eq!(img.depth.len(), 160 * 120);
    assert!(img.depth.iter().all(|d| *d == f64::INFINITY));
}

#[test]
fn laser_against_a_flat_wall() {
    for base in [Pose2D::default(), Pose2D::new(1.3, -0.7, 2.1)] {
        let (mut inst, r) = scene(base);
        let origin = get_laser_scan(&inst, r, "front").unwrap().origin;
        let (shape, pose) = common::wall_ahead(&origin, 0, 2.0);
        inst.add_static_body(shape, pose).unwrap();
        let scan = get_laser_scan(&inst, r, "front").unwrap();
        for (a, d) in scan.angles.iter().zip(&scan.ranges) {
            assert!((d - 2.0 / a.cos()).abs() < 1e-9, "angle {a}: {d}");
        }
        // The side lasers look away from the wall.
        assert!(get_laser_scan(&inst, r, "left").unwrap().ranges.iter().all(|d| d.is_infinite()));
    }
}

#[test]
fn wall_beyond_max_range_is_a_miss() {
    let (mut inst, r) = scene(Pose2D::default());
    let origin = get_laser_scan(&inst, r, "front").unwrap().origin;
    let (shape, pose) = common::wall_ahead(&origin, 0, 3.5);
    inst.add_static_body(shape, pose).unwrap();
    let scan = get_laser_scan(&inst, r, "front").unwrap();
    assert!(scan.ranges.iter().all(|d| d.is_infinite()));
    assert!(scan.ranges.iter().filter(|d| d.is_finite()).all(|d| *d <= scan.max_range));
}

#[test]
fn depth_against_a_perpendicular_wall() {
    let (mut inst, r) = scene(Pose2D::new(0.4, 0.2, -0.3));
    let frame = camera_frame(&inst, r);
    let (shape, pose) = common::wall_ahead(&frame, 2, 2.0);
    inst.add_static_body(shape, pose).unwrap();
    for res in Resolution::ALL {
        let img = get_depth_image(&inst, r, "depth", res).unwrap();
        let (w, h) = res.dims();
        assert_eq!((img.width, img.height), (w, h));
        assert_eq!(img.depth.len(), (w * h) as usize);
        let worst = img.depth.iter().map(|d| (d - 2.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "{res:?}: worst error {worst}");
    }
}

#[test]
fn downsampled_grids_coincide() {
    let (mut inst, r) = scene(Pose2D::default());
    let frame = camera_frame(&inst, r);
    let mut rng = common::rng(17);
    for _ in 0..12 {
        let ahead = frame.rotation.column(2) * rng.random_range(1.0..5.0);
        let side = common::random_unit(&mut rng) * 0.8;
        let pose = Pose::new(common::random_rotation(&mut rng), frame.translation + ahead + side);
        inst.add_static_body(common::random_shape(&mut rng), pose).unwrap();
    }
    let small = get_depth_image(&inst, r, "depth", Resolution::Qqvga).unwrap();
    let large = get_depth_image(&inst, r, "depth", Resolution::Vga).unwrap();
    let mut finite = 0;
    for v in 0..120 {
        for u in 0..160 {
            let (a, b) = (small.at(u, v), large.at(4 * u, 4 * v));
            if a.is_finite() || b.is_finite() {
                finite += 1;
                assert!((a - b).abs() < 1e-9, "({u},{v}): {a} vs {b}");
            }
        }
    }
    assert!(finite > 100, "scene should be visible: {finite}");
    let (ks, kl) = (small.intrinsics, large.intrinsics);
    assert_eq!([kl.fx, kl.fy, kl.cx, kl.cy], [4.0 * ks.fx, 4.0 * ks.fy, 4.0 * ks.cx, 4.0 * ks.cy]);
}

#[test]
fn finite_depths_respect_clip_planes() {
    let (mut inst, r) = scene(Pose2D::default());
    let frame = camera_frame(&inst, r);
    // A small cube inside the near plane and a wall beyond the far plane.
    let (_, near_pose) = common::wall_ahead(&frame, 2, 0.1);
    inst.add_static_body(Shape::cuboid(0.05, 0.05, 0.05), near_pose).unwrap();
    let (wall, far_pose) = common::wall_ahead(&frame, 2, 9.0);
    inst.add_static_body(wall, far_pose).unwrap();
    let img = get_depth_image(&inst, r, "depth", Resolution::Qvga).unwrap();
    assert!(img.depth.iter().all(|d| d.is_infinite()));
}

#[test]
fn laser_matches_per_shape_oracle_on_random_scenes() {
    let mut rng = common::rng(4);
    for _ in 0..30 {
        let (mut inst, r) = scene(Pose2D::default());
        let mut bodies = Vec::new();
        for _ in 0..6 {
            let shape = common::random_shape(&mut rng);
            let dir = rng.random_range(-1.0..1.0f64);
            let dist = rng.random_range(1.2..2.8);
            let pose = Pose::new(
                common::random_rotation(&mut rng),
                Vector3::new(dist * dir.cos(), dist * dir.sin(), rng.random_range(-0.2..0.4)),
            );
            inst.add_static_body(shape, pose).unwrap();
            bodies.push((shape, pose));
        }
        let scan = get_laser_scan(&inst, r, "front").unwrap();
        for (a, d) in scan.angles.iter().zip(&scan.ranges) {
            let o = scan.origin.translation;
            let dir = scan.origin.transform_vector(&Vector3::new(a.cos(), a.sin(), 0.0));
            let want = bodies
                .iter()
                .filter_map(|(s, p)| common::ray_oracle(s, p, &o, &dir))
                .filter(|t| *t <= scan.max_range)
                .fold(f64::INFINITY, f64::min);
            assert!(d == &want || (d - want).abs() < 1e-9, "angle {a}: {d} vs {want}");
        }
    }
}

#[test]
fn own_links_are_invisible() {
    // Arm raised in front of the camera and lasers.
    let (mut inst, r) = scene(Pose2D::default());
    inst.set_angles(r, &["RShoulderPitch", "LShoulderPitch"], &[-1.0, -1.0], 1.0).unwrap();
    inst.step(2000);
    assert!(get_depth_image(&inst, r, "depth", Resolution::Qqvga).unwrap().depth.iter().all(|d| d.is_infinite()));
    // A second robot is visible to the first.
    let other = inst.spawn_robot(pepper(), Pose2D::new(2.0, 0.0, 0.0)).unwrap();
    assert!(get_laser_scan(&inst, r, "front").unwrap().ranges.iter().any(|d| d.is_finite()));
    assert!(get_laser_scan(&inst, other, "front").unwrap().ranges.iter().all(|d| d.is_infinite()));
}

#[test]
fn timestamps_and_errors() {
    let (mut inst, r) = scene(Pose2D::default());
    inst.step(57);
    assert_eq!(get_laser_scan(&inst, r, "left").unwrap().timestamp, inst.clock());
    assert_eq!(get_depth_image(&inst, r, "depth", Resolution::Qqvga).unwrap().timestamp, inst.clock());
    assert_eq!(get_laser_scan(&inst, r, "top").unwrap_err(), SimError::UnknownLaser("top".into()));
    assert_eq!(
        get_depth_image(&inst, r, "rgb", Resolution::Qqvga).unwrap_err(),
        SimError::UnknownCamera("rgb".into())
    );
    assert_eq!(Resolution::from_dims(1280, 720).unwrap_err(), SimError::UnsupportedResolution(1280, 720));
    assert_eq!(get_laser_scan(&inst, 9, "front").unwrap_err(), SimError::UnknownRobot(9));
}

#[test]
fn serialization_formats() {
    let (mut inst, r) = scene(Pose2D::default());
    let frame = camera_frame(&inst, r);
    let (shape, pose) = common::wall_ahead(&frame, 2, 2.0);
    inst.add_static_body(shape, pose).unwrap();
    let origin = get_laser_scan(&inst, r, "front").unwrap().origin;
    let (shape, pose) = common::wall_ahead(&origin, 0, 2.5);
    inst.add_static_body(shape, pose).unwrap();

    let scan = get_laser_scan(&inst, r, "left").unwrap();
    let json: serde_json::Value = serde_json::from_str(&scan.to_json()).unwrap();
    assert!(json["ranges"].as_array().unwrap().iter().any(|v| v.is_null()));
    assert_eq!(json["max_range"], 3.0);
    let back: LaserScan = serde_json::from_str(&scan.to_json()).unwrap();
    assert_eq!(back, scan);

    let img = get_depth_image(&inst, r, "depth", Resolution::Qqvga).unwrap();
    let pgm = img.to_pgm();
    let header = b"P5\n160 120\n65535\n";
    assert_eq!(&pgm[..header.len()], header);
    let px = &pgm[header.len()..];
    assert_eq!(px.len(), 160 * 120 * 2);
    assert!(px.chunks(2).all(|c| u16::from_be_bytes([c[0], c[1]]) == 2000));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("depth.pgm");
    img.write_pgm(&path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), pgm);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("depth.json")).unwrap()).unwrap();
    assert_eq!(meta["width"], 160);
    assert_eq!(meta["units"], "mm");

    let round: DepthImage = serde_json::from_str(&serde_json::to_string(&img).unwrap()).unwrap();
    assert_eq!(round, img);
}
