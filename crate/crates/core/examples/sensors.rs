//! Places a wall in front of a robot, takes a laser scan and a depth image
//! and writes the image as a 16-bit PGM with a JSON sidecar.
//!
//!     cargo run --example sensors -- [out_dir]

use kinesim::assets::RobotAsset;
use kinesim::collision::Shape;
use kinesim::math::Pose;
use kinesim::sensors::{get_depth_image, get_laser_scan, Resolution};
use kinesim::sim::{Instance, InstanceConfig, Pose2D};
use nalgebra::Vector3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1).unwrap_or_else(|| ".".to_string());
    let mut inst = Instance::new(1, InstanceConfig::default())?;
    let robot = inst.spawn_robot(RobotAsset::bundled("pepper_simple")?.shared(), Pose2D::default())?;
    inst.add_static_body(Shape::cuboid(0.05, 3.0, 1.5), Pose::from_translation(Vector3::new(2.2, 0.0, 1.5)))?;
    inst.add_static_body(Shape::Sphere { radius: 0.25 }, Pose::from_translation(Vector3::new(1.2, 0.4, 1.0)))?;

    for id in ["front", "left", "right"] {
        let scan = get_laser_scan(&inst, robot, id)?;
        let hits: Vec<String> = scan.ranges.iter().map(|r| if r.is_finite() { format!("{r:.2}") } else { "-".into() }).collect();
        println!("{id:>5}: {}", hits.join(" "));
    }

    let img = get_depth_image(&inst, robot, "depth", Resolution::Qvga)?;
    let finite = img.depth.iter().filter(|d| d.is_finite()).count();
    println!("depth {}x{}: {finite} finite pixels, center {:.3} m", img.width, img.height, img.at(img.width / 2, img.height / 2));
    let path = format!("{out_dir}/depth.pgm");
    img.write_pgm(&path)?;
    println!("wrote {path}");
    Ok(())
}
