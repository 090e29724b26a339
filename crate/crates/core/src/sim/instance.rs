use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::base::integrate_twist;
use super::{BaseCaps, InstanceConfig, Pose2D, SimError, GOTO_TOLERANCE, SPEED_EPS};
use crate::assets::RobotAsset;
use crate::collision::{BodyId, Contact, Shape, World};
use crate::kinematics::Configuration;
use crate::math::{normalize_angle, Pose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointCommand {
    pub target: f64,
    /// Effective speed: fraction × velocity limit.
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseCommand {
    #[default]
    Idle,
    Velocity { vx: f64, vy: f64, wz: f64 },
    GoTo { x: f64, y: f64, theta: f64 },
}

#[derive(Debug, Clone)]
pub struct RobotState {
    asset: Arc<RobotAsset>,
    base: Pose2D,
    q: Vec<f64>,
    joint_commands: Vec<Option<JointCommand>>,
    base_command: BaseCommand,
    caps: BaseCaps,
}

impl RobotState {
    pub fn asset(&self) -> &Arc<RobotAsset> {
        &self.asset
    }

    pub fn base(&self) -> Pose2D {
        self.base
    }

    /// Joint values in the asset's tree order.
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn configuration(&self) -> Configuration {
        self.asset
            .tree()
            .movable_joints()
            .iter()
            .cloned()
            .zip(self.q.iter().copied())
            .collect()
    }

    pub fn joint_command(&self, joint: &str) -> Option<JointCommand> {
        let i = self.asset.tree().dof_index(joint)?;
        self.joint_commands[i]
    }

    pub fn base_command(&self) -> BaseCommand {
        self.base_command
    }

    pub fn caps(&self) -> BaseCaps {
        self.caps
    }

    /// Base pose lifted into 3D at the model's base height.
    pub fn base_pose(&self) -> Pose {
        let r = Rotation3::from_axis_angle(&Vector3::z_axis(), self.base.theta);
        Pose::new(
            *r.matrix(),
            Vector3::new(self.base.x, self.base.y, self.asset.profile.base_height),
        )
    }

    /// World poses of every link, in the asset's tree link order.
    pub fn link_poses(&self) -> Vec<Pose> {
        let base = self.base_pose();
        self.asset
            .tree()
            .fk(&self.q)
            .expect("state vector matches the tree")
            .iter()
            .map(|p| base.compose(p))
            .collect()
    }

    pub fn link_pose(&self, link: &str) -> Option<Pose> {
        let i = self.asset.tree().link_index(link)?;
        Some(self.link_poses()[i])
    }

    fn push_bodies(&self, robot: u64, world: &mut World) {
        let poses = self.link_poses();
        for (name, pose) in self.asset.tree().link_names().iter().zip(&poses) {
            let link = self.asset.model.link(name).expect("tree links come from the model");
            for c in &link.collisions {
                world.push(
                    BodyId::Link {
                        robot,
                        link: name.clone(),
                    },
                    c.shape,
                    pose.compose(&c.origin),
                );
            }
        }
    }

    fn dof_index(&self, joint: &str) -> Result<usize, SimError> {
        self.asset
            .tree()
            .dof_index(joint)
            .ok_or_else(|| SimError::UnknownJoint(joint.to_string()))
    }

    fn step(&mut self, dt: f64) {
        for (i, slot) in self.joint_commands.iter_mut().enumerate() {
            let Some(cmd) = *slot else { continue };
            let max = cmd.speed * dt;
            let remaining = cmd.target - self.q[i];
            if remaining.abs() <= max + SPEED_EPS {
                self.q[i] = cmd.target;
                *slot = None;
            } else {
                self.q[i] += max.copysign(remaining);
            }
        }

        match self.base_command {
            BaseCommand::Idle => {}
            BaseCommand::Velocity { vx, vy, wz } => {
                self.base = integrate_twist(&self.base, vx, vy, wz, dt);
            }
            BaseCommand::GoTo { x, y, theta } => {
                let (dx, dy) = (x - self.base.x, y - self.base.y);
                let dist = dx.hypot(dy);
                let lin = self.caps.linear * dt;
                if dist <= lin + SPEED_EPS || dist < GOTO_TOLERANCE {
                    self.base.x = x;
                    self.base.y = y;
                } else {
                    self.base.x += dx / dist * lin;
                    self.base.y += dy / dist * lin;
                }
                // normalize_angle maps an exact half turn to +π, so ties rotate positively.
                let dtheta = normalize_angle(theta - self.base.theta);
                let ang = self.caps.angular * dt;
                if dtheta.abs() <= ang + SPEED_EPS || dtheta.abs() < GOTO_TOLERANCE {
                    self.base.theta = theta;
                } else {
                    self.base.theta = normalize_angle(self.base.theta + ang.copysign(dtheta));
                }
                if self.base.x == x && self.base.y == y && self.base.theta == theta {
                    self.base_command = BaseCommand::Idle;
                }
            }
        }
    }
}

/// One independent simulated world.
#[derive(Debug, Clone)]
pub struct Instance {
    id: u64,
    config: InstanceConfig,
    steps: u64,
    robots: BTreeMap<u64, RobotState>,
    statics: BTreeMap<u64, (Shape, Pose)>,
    next_robot: u64,
    next_static: u64,
    rng: ChaCha8Rng,
}

impl Instance {
    pub fn new(id: u64, config: InstanceConfig) -> Result<Self, SimError> {
        config.validate()?;
        Ok(Self {
            id,
            config,
            steps: 0,
            robots: BTreeMap::new(),
            statics: BTreeMap::new(),
            next_robot: 1,
            next_static: 1,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn config(&self) -> &InstanceConfig {
        &self.config
    }

    pub fn step_count(&self) -> u64 {
        self.steps
    }

    /// Simulated time; exactly `step_count × dt`.
    pub fn clock(&self) -> f64 {
        self.steps as f64 * self.config.dt
    }

    /// Back to the post-create state with the same seed.
    pub fn reset(&mut self) {
        *self = Self::new(self.id, self.config).expect("config was validated at creation");
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn robot_ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.robots.keys().copied()
    }

    pub fn robot(&self, robot: u64) -> Result<&RobotState, SimError> {
        self.robots.get(&robot).ok_or(SimError::UnknownRobot(robot))
    }

    fn robot_mut(&mut self, robot: u64) -> Result<&mut RobotState, SimError> {
        self.robots.get_mut(&robot).ok_or(SimError::UnknownRobot(robot))
    }

    pub fn spawn_robot(&mut self, asset: Arc<RobotAsset>, base: Pose2D) -> Result<u64, SimError> {
        if !base.is_finite() {
            return Err(SimError::NonFinite("base pose"));
        }
        let n = asset.tree().movable_joints().len();
        let caps = self
            .config
            .base_caps
            .or(asset.profile.base_caps)
            .unwrap_or_default();
        let state = RobotState {
            q: asset.zero_vector(),
            base: Pose2D::new(base.x, base.y, base.theta),
            joint_commands: vec![None; n],
            base_command: BaseCommand::Idle,
            caps,
            asset,
        };

        let id = self.next_robot;
        let mut world = self.world();
        state.push_bodies(id, &mut world);
        let contacts = world.contacts(|b| b.robot() == Some(id), |b| b.robot() != Some(id), true);
        if !contacts.is_empty() {
            let mut pairs: Vec<String> = contacts.iter().map(|c| format!("{} vs {}", c.a, c.b)).collect();
            pairs.dedup();
            return Err(SimError::SpawnInCollision(pairs));
        }

        self.next_robot += 1;
        self.robots.insert(id, state);
        Ok(id)
    }

    pub fn remove_robot(&mut self, robot: u64) -> Result<(), SimError> {
        self.robots.remove(&robot).map(|_| ()).ok_or(SimError::UnknownRobot(robot))
    }

    /// Adds a fixed obstacle and returns its id.
    pub fn add_static_body(&mut self, shape: Shape, pose: Pose) -> Result<u64, SimError> {
        if !shape.is_valid() {
            return Err(SimError::InvalidBody(format!("{shape:?}")));
        }
        if !pose.translation.iter().chain(pose.rotation.iter()).all(|v| v.is_finite()) {
            return Err(SimError::NonFinite("body pose"));
        }
        let id = self.next_static;
        self.next_static += 1;
        self.statics.insert(id, (shape, pose));
        Ok(id)
    }

    pub fn remove_static_body(&mut self, id: u64) -> Result<(), SimError> {
        self.statics
            .remove(&id)
            .map(|_| ())
            .ok_or_else(|| SimError::InvalidBody(format!("no static body {id}")))
    }

    pub fn static_bodies(&self) -> impl Iterator<Item = (u64, &Shape, &Pose)> {
        self.statics.iter().map(|(id, (s, p))| (*id, s, p))
    }

    pub fn step(&mut self, n_steps: u64) {
        let dt = self.config.dt;
        for _ in 0..n_steps {
            for robot in self.robots.values_mut() {
                robot.step(dt);
            }
            self.steps += 1;
        }
    }

    pub fn set_angles<S: AsRef<str>>(
        &mut self,
        robot: u64,
        names: &[S],
        targets: &[f64],
        fraction_max_speed: f64,
    ) -> Result<(), SimError> {
        if names.len() != targets.len() {
            return Err(SimError::LengthMismatch(names.len(), targets.len()));
        }
        if !(fraction_max_speed > 0.0 && fraction_max_speed <= 1.0) {
            return Err(SimError::InvalidFraction(fraction_max_speed));
        }
        let state = self.robot_mut(robot)?;
        let mut commands = Vec::with_capacity(names.len());
        for (name, &target) in names.iter().zip(targets) {
            let name = name.as_ref();
            let i = state.dof_index(name)?;
            let joint = state.asset.model.joint(name).expect("indexed joints exist");
            let limits = joint.limits.expect("movable joints carry limits");
            if !limits.contains(target) {
                return Err(SimError::TargetOutOfLimits {
                    joint: name.to_string(),
                    target,
                    lower: limits.lower,
                    upper: limits.upper,
                });
            }
            commands.push((
                i,
                JointCommand {
                    target,
                    speed: fraction_max_speed * limits.velocity,
                },
            ));
        }
        for (i, cmd) in commands {
            state.joint_commands[i] = Some(cmd);
        }
        Ok(())
    }

    pub fn get_angles<S: AsRef<str>>(&self, robot: u64, names: &[S]) -> Result<Vec<f64>, SimError> {
        let state = self.robot(robot)?;
        names
            .iter()
            .map(|n| state.dof_index(n.as_ref()).map(|i| state.q[i]))
            .collect()
    }

    pub fn go_to_posture(&mut self, robot: u64, posture: &str, fraction_max_speed: f64) -> Result<(), SimError> {
        let table = self
            .robot(robot)?
            .asset
            .posture(posture)
            .ok_or_else(|| SimError::UnknownPosture(posture.to_string()))?
            .clone();
        let names: Vec<&str> = table.keys().map(String::as_str).collect();
        let targets: Vec<f64> = table.values().copied().collect();
        self.set_angles(robot, &names, &targets, fraction_max_speed)
    }

    /// Persistent body-frame velocity command. A zero twist stops the base.
    pub fn move_base(&mut self, robot: u64, vx: f64, vy: f64, wz: f64) -> Result<(), SimError> {
        if !(vx.is_finite() && vy.is_finite() && wz.is_finite()) {
            return Err(SimError::NonFinite("velocity"));
        }
        let state = self.robot_mut(robot)?;
        let linear = vx.hypot(vy);
        if linear > state.caps.linear + SPEED_EPS {
            return Err(SimError::SpeedCapExceeded {
                what: "linear speed",
                value: linear,
                cap: state.caps.linear,
            });
        }
        if wz.abs() > state.caps.angular + SPEED_EPS {
            return Err(SimError::SpeedCapExceeded {
                what: "angular speed",
                value: wz.abs(),
                cap: state.caps.angular,
            });
        }
        state.base_command = if vx == 0.0 && vy == 0.0 && wz == 0.0 {
            BaseCommand::Idle
        } else {
            BaseCommand::Velocity { vx, vy, wz }
        };
        Ok(())
    }

    pub fn move_to(&mut self, robot: u64, x: f64, y: f64, theta: f64) -> Result<(), SimError> {
        if !(x.is_finite() && y.is_finite() && theta.is_finite()) {
            return Err(SimError::NonFinite("target"));
        }
        let state = self.robot_mut(robot)?;
        state.base_command = BaseCommand::GoTo {
            x,
            y,
            theta: normalize_angle(theta),
        };
        Ok(())
    }

    /// True when the robot has no active base command.
    pub fn is_move_finished(&self, robot: u64) -> Result<bool, SimError> {
        Ok(self.robot(robot)?.base_command == BaseCommand::Idle)
    }

    pub fn get_odometry(&self, robot: u64) -> Result<Pose2D, SimError> {
        Ok(self.robot(robot)?.base)
    }

    /// Uniform draw within each joint's limits from the instance RNG
    /// (continuous joints over [−π, π]).
    pub fn random_configuration(&mut self, robot: u64) -> Result<Vec<f64>, SimError> {
        let asset = self.robot(robot)?.asset.clone();
        Ok(asset
            .tree()
            .movable_joints()
            .iter()
            .map(|n| {
                let (lo, hi) = asset.model.joint(n).and_then(|j| j.limits).map_or((0.0, 0.0), |l| l.sampling_range());
                if lo < hi {
                    self.rng.random_range(lo..=hi)
                } else {
                    lo
                }
            })
            .collect())
    }

    /// Frozen snapshot of every collision body.
    pub fn world(&self) -> World {
        let mut world = World::new(self.config.ground_plane);
        for (&id, (shape, pose)) in &self.statics {
            world.push(BodyId::Static { id }, *shape, *pose);
        }
        for (&id, robot) in &self.robots {
            robot.push_bodies(id, &mut world);
        }
        world
    }

    /// Penetrating contacts between the given links of `robot` (all links when
    /// `links` is empty) and bodies that do not belong to that robot.
    pub fn world_collision<S: AsRef<str>>(&self, robot: u64, links: &[S]) -> Result<Vec<Contact>, SimError> {
        let state = self.robot(robot)?;
        for l in links {
            if state.asset.model.link(l.as_ref()).is_none() {
                return Err(SimError::UnknownLink(l.as_ref().to_string()));
            }
        }
        let world = self.world();
        let query = |b: &BodyId| match b {
            BodyId::Link { robot: r, link } => {
                *r == robot && (links.is_empty() || links.iter().any(|l| l.as_ref() == link))
            }
            _ => false,
        };
        Ok(world.contacts(query, |b| b.robot() != Some(robot), true))
    }

    /// SHA-256 over the full instance state (config, clock, robots, commands,
    /// static bodies, RNG position), as lowercase hex.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        let mut f = |v: f64| h.update(v.to_bits().to_le_bytes());
        f(self.config.dt);
        let caps = self.config.base_caps.unwrap_or(BaseCaps {
            linear: f64::NAN,
            angular: f64::NAN,
        });
        f(caps.linear);
        f(caps.angular);
        let mut u = |v: u64| h.update(v.to_le_bytes());
        u(self.config.seed);
        u(self.config.ground_plane as u64);
        u(self.steps);
        u(self.next_robot);
        u(self.next_static);
        h.update(self.rng.get_word_pos().to_le_bytes());
        for (&id, r) in &self.robots {
            h.update(id.to_le_bytes());
            h.update(r.asset.sha256().as_bytes());
            for v in [r.base.x, r.base.y, r.base.theta, r.caps.linear, r.caps.angular] {
                h.update(v.to_bits().to_le_bytes());
            }
            for (q, cmd) in r.q.iter().zip(&r.joint_commands) {
                h.update(q.to_bits().to_le_bytes());
                match cmd {
                    None => h.update([0u8]),
                    Some(c) => {
                        h.update([1u8]);
                        h.update(c.target.to_bits().to_le_bytes());
                        h.update(c.speed.to_bits().to_le_bytes());
                    }
                }
            }
            let (tag, vals) = match r.base_command {
                BaseCommand::Idle => (0u8, [0.0; 3]),
                BaseCommand::Velocity { vx, vy, wz } => (1, [vx, vy, wz]),
                BaseCommand::GoTo { x, y, theta } => (2, [x, y, theta]),
            };
            h.update([tag]);
            for v in vals {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        for (&id, (shape, pose)) in &self.statics {
            h.update(id.to_le_bytes());
            h.update(shape.kind_name().as_bytes());
            for v in shape.dimensions().iter().chain(pose.translation.iter()).chain(pose.rotation.iter()) {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}
