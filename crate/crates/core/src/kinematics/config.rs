use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::KinematicsError;
use crate::urdf::RobotModel;

/// Named joint positions, in insertion order. Radians for rotational joints,
/// meters for prismatic ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(IndexMap<String, f64>);

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    /// All movable joints of `model` at zero.
    pub fn zeros(model: &RobotModel) -> Self {
        model.movable_joints().map(|j| (j.name.clone(), 0.0)).collect()
    }

    /// Builds a configuration, rejecting unknown joints and values outside
    /// the joint limits.
    pub fn with_limits<I, S>(model: &RobotModel, pairs: I) -> Result<Self, KinematicsError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut cfg = Configuration::new();
        for (name, value) in pairs {
            let name = name.into();
            let joint = model
                .joint(&name)
                .filter(|j| j.kind.is_movable())
                .ok_or_else(|| KinematicsError::UnknownJoint(name.clone()))?;
            if value.is_nan() {
                return Err(KinematicsError::NotANumber(name));
            }
            if let Some(l) = joint.limits {
                if !l.contains(value) {
                    return Err(KinematicsError::OutOfLimits {
                        joint: name,
                        value,
                        lower: l.lower,
                        upper: l.upper,
                    });
                }
            }
            cfg.set(name, value);
        }
        Ok(cfg)
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Configuration {
    fn from_iter<T: IntoIterator<Item = (S, f64)>>(iter: T) -> Self {
        Configuration(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}
