//! Headless kinematic simulation of URDF robots: model parsing and
//! validation, forward kinematics and manipulability, collision and ray
//! queries, fixed-step simulation instances with sensors, workspace
//! sampling, and a line-delimited JSON control protocol.

// `!(x > 0.0)` is used on purpose so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assets;
pub mod collision;
pub mod interface;
pub mod kinematics;
pub mod math;
pub mod sensors;
pub mod sim;
pub mod urdf;
pub mod workspace;
