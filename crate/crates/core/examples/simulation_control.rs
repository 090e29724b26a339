//! Drives one robot through joint commands, a posture change and base
//! motion, printing joint angles, odometry and the state digest.

use kinesim::assets::RobotAsset;
use kinesim::sim::{Instance, InstanceConfig, Pose2D};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut inst = Instance::new(1, InstanceConfig { seed: 7, ..Default::default() })?;
    let robot = inst.spawn_robot(RobotAsset::bundled("pepper_simple")?.shared(), Pose2D::default())?;

    inst.set_angles(robot, &["HeadYaw", "RShoulderPitch"], &[0.6, -0.5], 0.25)?;
    for _ in 0..4 {
        inst.step(60);
        let q = inst.get_angles(robot, &["HeadYaw", "RShoulderPitch"])?;
        println!("t = {:.3} s  HeadYaw {:.4}  RShoulderPitch {:.4}", inst.clock(), q[0], q[1]);
    }

    inst.go_to_posture(robot, "StandZero", 0.5)?;
    inst.move_base(robot, 0.2, 0.0, 0.5)?;
    inst.step(480);
    println!("after arc: {:?}", inst.get_odometry(robot)?);

    inst.move_to(robot, 1.0, -0.5, 1.0)?;
    let mut steps = 0;
    while !inst.is_move_finished(robot)? {
        inst.step(1);
        steps += 1;
    }
    println!("move_to finished after {steps} steps at {:?}", inst.get_odometry(robot)?);
    println!("digest {} after {} steps", inst.digest(), inst.step_count());
    Ok(())
}
