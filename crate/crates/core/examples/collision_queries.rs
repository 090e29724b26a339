//! Pairwise distances, self-collision of a posed robot, contacts against a
//! table and a ray cast through a small world.

use kinesim::assets::RobotAsset;
use kinesim::collision::{pair_distance, self_collision, BodyId, Shape, World};
use kinesim::kinematics::Configuration;
use kinesim::math::Pose;
use kinesim::sim::{Instance, InstanceConfig, Pose2D};
use nalgebra::Vector3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let at = |x, y, z| Pose::from_translation(Vector3::new(x, y, z));

    let capsule = Shape::Capsule { radius: 0.1, half_length: 0.3 };
    let sphere = Shape::Sphere { radius: 0.2 };
    let r = pair_distance(&capsule, &at(0.0, 0.0, 0.0), &sphere, &at(1.0, 0.0, 0.0));
    println!("capsule-sphere distance {:.3}, closest points {:?} {:?}", r.signed_distance, r.closest_point_a, r.closest_point_b);

    let asset = RobotAsset::bundled("pepper_simple")?;
    let mut q = Configuration::zeros(&asset.model);
    q.set("RShoulderRoll", -0.3);
    q.set("RElbowRoll", 1.5);
    q.set("RShoulderPitch", 1.4);
    let pairs = self_collision(&asset.model, &q, &asset.profile.ignore_pairs)?;
    println!("self-collision pairs at a folded arm: {pairs:?}");

    let mut inst = Instance::new(1, InstanceConfig::default())?;
    let robot = inst.spawn_robot(asset.shared(), Pose2D::default())?;
    inst.add_static_body(Shape::cuboid(0.3, 0.5, 0.02), at(0.35, -0.15, 0.8))?;
    for c in inst.world_collision(robot, &[] as &[&str])? {
        println!("contact {:?} / {:?}: depth {:.4}", c.a, c.b, c.result.signed_distance);
    }

    let mut world = World::new(true);
    world.push(BodyId::Static { id: 1 }, Shape::cuboid(0.5, 0.5, 0.5), at(3.0, 0.0, 0.5));
    let hit = world.ray_cast(&Vector3::new(0.0, 0.0, 0.5), &Vector3::x(), 10.0)?;
    println!("ray hit {:?}", hit.map(|h| (h.distance, world.body_id(&h))));
    Ok(())
}
