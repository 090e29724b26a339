use std::collections::{HashMap, HashSet};
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use roxmltree::{Document, Node};

use super::{CollisionShape, Inertial, Joint, JointKind, JointLimits, Link, RobotModel, UrdfError};
use crate::collision::Shape;
use crate::math::Pose;

pub fn parse_urdf_file(path: impl AsRef<Path>) -> Result<RobotModel, UrdfError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| UrdfError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_urdf(&text)
}

/// Parses a URDF document into a [`RobotModel`].
///
/// Structural problems (kinds, dangling names, non-tree topology, missing
/// limits) are errors. Numeric invariants such as `lower <= upper` or
/// non-negative mass are left to [`super::validate_model`].
pub fn parse_urdf(text: &str) -> Result<RobotModel, UrdfError> {
    let doc = Document::parse(text).map_err(|e| UrdfError::Xml(e.to_string()))?;
    let robot = doc.root_element();
    if robot.tag_name().name() != "robot" {
        return Err(UrdfError::Malformed(format!(
            "root element is <{}>, expected <robot>",
            robot.tag_name().name()
        )));
    }
    let name = robot.attribute("name").unwrap_or("").to_string();

    let mut links = Vec::new();
    let mut joints = Vec::new();
    for node in robot.children().filter(Node::is_element) {
        match node.tag_name().name() {
            "link" => links.push(parse_link(node)?),
            "joint" => joints.push(parse_joint(node)?),
            _ => {}
        }
    }

    let root_link = tree_root(&links, &joints)?;
    Ok(RobotModel {
        name,
        links,
        joints,
        root_link,
    })
}

/// Checks that links and joints form a single rooted tree and returns the root.
pub(crate) fn tree_root(links: &[Link], joints: &[Joint]) -> Result<String, UrdfError> {
    let mut link_names = HashSet::new();
    for l in links {
        if !link_names.insert(l.name.as_str()) {
            return Err(UrdfError::Duplicate {
                what: "link",
                name: l.name.clone(),
            });
        }
    }
    let mut joint_names = HashSet::new();
    let mut parent_of: HashMap<&str, &str> = HashMap::new();
    for j in joints {
        if !joint_names.insert(j.name.as_str()) {
            return Err(UrdfError::Duplicate {
                what: "joint",
                name: j.name.clone(),
            });
        }
        for link in [&j.parent, &j.child] {
            if !link_names.contains(link.as_str()) {
                return Err(UrdfError::DanglingLink {
                    joint: j.name.clone(),
                    link: link.clone(),
                });
            }
        }
        if parent_of.insert(j.child.as_str(), j.parent.as_str()).is_some() {
            return Err(UrdfError::NotATree(format!(
                "link `{}` has more than one parent joint",
                j.child
            )));
        }
    }

    let roots: Vec<&str> = links
        .iter()
        .map(|l| l.name.as_str())
        .filter(|n| !parent_of.contains_key(n))
        .collect();
    let root = match roots.as_slice() {
        [single] => *single,
        [] => return Err(UrdfError::NotATree("no root link (cycle)".into())),
        many => {
            return Err(UrdfError::NotATree(format!(
                "multiple root links: {}",
                many.join(", ")
            )))
        }
    };

    // every link must reach the root without revisiting a link
    for l in links {
        let mut seen = HashSet::new();
        let mut cur = l.name.as_str();
        while let Some(&p) = parent_of.get(cur) {
            if !seen.insert(cur) {
                return Err(UrdfError::NotATree(format!("cycle through link `{cur}`")));
            }
            cur = p;
        }
        if cur != root {
            return Err(UrdfError::NotATree(format!(
                "link `{}` is not reachable from root `{root}`",
                l.name
            )));
        }
    }
    Ok(root.to_string())
}

fn required<'a>(node: Node<'a, '_>, attr: &str) -> Result<&'a str, UrdfError> {
    node.attribute(attr).ok_or_else(|| {
        UrdfError::Malformed(format!(
            "<{}> is missing attribute `{attr}`",
            node.tag_name().name()
        ))
    })
}

fn child<'a, 'i>(node: Node<'a, 'i>, tag: &str) -> Option<Node<'a, 'i>> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name() == tag)
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>, UrdfError> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| UrdfError::Malformed(format!("bad number `{t}` in {what}")))
        })
        .collect()
}

fn parse_vec3(s: &str, what: &str) -> Result<[f64; 3], UrdfError> {
    let v = parse_floats(s, what)?;
    <[f64; 3]>::try_from(v.as_slice())
        .map_err(|_| UrdfError::Malformed(format!("{what} needs 3 numbers, got `{s}`")))
}

fn parse_f64_attr(node: Node, attr: &str) -> Result<Option<f64>, UrdfError> {
    node.attribute(attr)
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                UrdfError::Malformed(format!(
                    "bad number `{s}` in <{} {attr}>",
                    node.tag_name().name()
                ))
            })
        })
        .transpose()
}

fn parse_origin(parent: Node) -> Result<Pose, UrdfError> {
    match child(parent, "origin") {
        None => Ok(Pose::identity()),
        Some(o) => {
            let xyz = o
                .attribute("xyz")
                .map(|s| parse_vec3(s, "origin xyz"))
                .transpose()?
                .unwrap_or([0.0; 3]);
            let rpy = o
                .attribute("rpy")
                .map(|s| parse_vec3(s, "origin rpy"))
                .transpose()?
                .unwrap_or([0.0; 3]);
            Ok(Pose::from_xyz_rpy(xyz, rpy))
        }
    }
}

fn parse_link(node: Node) -> Result<Link, UrdfError> {
    let mut link = Link::new(required(node, "name")?);

    if let Some(inertial) = child(node, "inertial") {
        let mass = child(inertial, "mass")
            .map(|m| parse_f64_attr(m, "value"))
            .transpose()?
            .flatten()
            .unwrap_or(0.0);
        let inertia = match child(inertial, "inertia") {
            Some(i) => {
                let g = |a: &str| parse_f64_attr(i, a).map(|v| v.unwrap_or(0.0));
                let (ixx, ixy, ixz, iyy, iyz, izz) =
                    (g("ixx")?, g("ixy")?, g("ixz")?, g("iyy")?, g("iyz")?, g("izz")?);
                Matrix3::new(ixx, ixy, ixz, ixy, iyy, iyz, ixz, iyz, izz)
            }
            None => Matrix3::zeros(),
        };
        link.inertial = Some(Inertial {
            mass,
            center_of_mass: parse_origin(inertial)?,
            inertia,
        });
    }

    for col in node
        .children()
        .filter(|c| c.is_element() && c.tag_name().name() == "collision")
    {
        let origin = parse_origin(col)?;
        let geometry = child(col, "geometry").ok_or_else(|| {
            UrdfError::Malformed(format!("collision on link `{}` lacks <geometry>", link.name))
        })?;
        let (shape, mesh_ref) = parse_geometry(geometry, &link.name)?;
        if let Some(shape) = shape {
            link.collisions.push(CollisionShape {
                shape,
                origin,
                mesh_ref,
            });
        }
    }

    if let Some(visual) = child(node, "visual") {
        link.visual_mesh_ref = child(visual, "geometry")
            .and_then(|g| child(g, "mesh"))
            .and_then(|m| m.attribute("filename"))
            .map(str::to_string);
    }
    Ok(link)
}

/// Returns `None` for a mesh without `capsule_approx`: it is recorded nowhere
/// and does not participate in collision checks.
fn parse_geometry(geometry: Node, link: &str) -> Result<(Option<Shape>, Option<String>), UrdfError> {
    let prim = geometry
        .children()
        .find(Node::is_element)
        .ok_or_else(|| UrdfError::Malformed(format!("empty <geometry> on link `{link}`")))?;
    let num = |attr: &str| -> Result<f64, UrdfError> {
        parse_f64_attr(prim, attr)?.ok_or_else(|| {
            UrdfError::Malformed(format!(
                "<{}> on link `{link}` is missing `{attr}`",
                prim.tag_name().name()
            ))
        })
    };
    let shape = match prim.tag_name().name() {
        "sphere" => Shape::sphere(num("radius")?),
        "box" => {
            let s = parse_vec3(required(prim, "size")?, "box size")?;
            Shape::cuboid(s[0] / 2.0, s[1] / 2.0, s[2] / 2.0)
        }
        "cylinder" => Shape::cylinder(num("radius")?, num("length")? / 2.0),
        "capsule" => Shape::capsule(num("radius")?, num("length")? / 2.0),
        "mesh" => {
            let file = prim.attribute("filename").map(str::to_string);
            return match prim.attribute("capsule_approx") {
                Some(s) => {
                    let v = parse_floats(s, "capsule_approx")?;
                    match v.as_slice() {
                        [r, h] => Ok((Some(Shape::capsule(*r, *h)), file)),
                        _ => Err(UrdfError::Malformed(format!(
                            "capsule_approx on link `{link}` needs `radius half_length`"
                        ))),
                    }
                }
                None => Ok((None, file)),
            };
        }
        other => {
            return Err(UrdfError::Malformed(format!(
                "unsupported geometry <{other}> on link `{link}`"
            )))
        }
    };
    Ok((Some(shape), None))
}

fn parse_joint(node: Node) -> Result<Joint, UrdfError> {
    let name = required(node, "name")?.to_string();
    let kind_str = required(node, "type")?;
    let kind = match kind_str {
        "revolute" => JointKind::Revolute,
        "continuous" => JointKind::Continuous,
        "prismatic" => JointKind::Prismatic,
        "fixed" => JointKind::Fixed,
        "planar" | "floating" => {
            return Err(UrdfError::UnsupportedJointKind {
                joint: name,
                kind: kind_str.to_string(),
            })
        }
        other => {
            return Err(UrdfError::UnknownJointKind {
                joint: name,
                kind: other.to_string(),
            })
        }
    };
    let link_ref = |tag: &str| -> Result<String, UrdfError> {
        let n = child(node, tag)
            .ok_or_else(|| UrdfError::Malformed(format!("joint `{name}` lacks <{tag}>")))?;
        Ok(required(n, "link")?.to_string())
    };
    let parent = link_ref("parent")?;
    let child_link = link_ref("child")?;
    let origin = parse_origin(node)?;

    let axis = match child(node, "axis").and_then(|a| a.attribute("xyz")) {
        Some(s) => {
            let a = Vector3::from(parse_vec3(s, "axis xyz")?);
            if kind.is_movable() {
                let n = a.norm();
                if !(n > 0.0 && n.is_finite()) {
                    return Err(UrdfError::Malformed(format!("joint `{name}` has a zero axis")));
                }
                a / n
            } else {
                a
            }
        }
        None => Vector3::x(),
    };

    let limit = child(node, "limit");
    let limits = match kind {
        JointKind::Fixed => None,
        JointKind::Revolute | JointKind::Prismatic => {
            let l = limit.ok_or_else(|| UrdfError::MissingLimits(name.clone()))?;
            Some(JointLimits {
                lower: parse_f64_attr(l, "lower")?.unwrap_or(0.0),
                upper: parse_f64_attr(l, "upper")?.unwrap_or(0.0),
                velocity: parse_f64_attr(l, "velocity")?.unwrap_or(0.0),
                effort: parse_f64_attr(l, "effort")?.unwrap_or(0.0),
            })
        }
        JointKind::Continuous => {
            let (velocity, effort) = match limit {
                Some(l) => (
                    parse_f64_attr(l, "velocity")?.unwrap_or(0.0),
                    parse_f64_attr(l, "effort")?.unwrap_or(0.0),
                ),
                None => (0.0, 0.0),
            };
            Some(JointLimits {
                lower: f64::NEG_INFINITY,
                upper: f64::INFINITY,
                velocity,
                effort,
            })
        }
    };

    Ok(Joint {
        name,
        kind,
        parent,
        child: child_link,
        origin,
        axis,
        limits,
    })
}
