use std::fmt::Write;

use super::{JointKind, RobotModel};
use crate::collision::Shape;
use crate::math::Pose;

fn origin_tag(pose: &Pose) -> String {
    let [x, y, z] = pose.xyz();
    let [r, p, yw] = pose.rpy();
    format!(r#"<origin xyz="{x} {y} {z}" rpy="{r} {p} {yw}"/>"#)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('"', "&quot;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Serializes a model back to URDF. Floats are written in shortest
/// round-trip form, so `parse_urdf(to_urdf_string(m))` reproduces `m` up to
/// the rpy ↔ matrix conversion.
pub fn to_urdf_string(model: &RobotModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0"?>"#);
    let _ = writeln!(out, r#"<robot name="{}">"#, xml_escape(&model.name));
    for link in &model.links {
        let _ = writeln!(out, r#"  <link name="{}">"#, xml_escape(&link.name));
        if let Some(i) = &link.inertial {
            let m = &i.inertia;
            let _ = writeln!(out, "    <inertial>");
            let _ = writeln!(out, "      {}", origin_tag(&i.center_of_mass));
            let _ = writeln!(out, r#"      <mass value="{}"/>"#, i.mass);
            let _ = writeln!(
                out,
                r#"      <inertia ixx="{}" ixy="{}" ixz="{}" iyy="{}" iyz="{}" izz="{}"/>"#,
                m[(0, 0)],
                m[(0, 1)],
                m[(0, 2)],
                m[(1, 1)],
                m[(1, 2)],
                m[(2, 2)]
            );
            let _ = writeln!(out, "    </inertial>");
        }
        if let Some(mesh) = &link.visual_mesh_ref {
            let _ = writeln!(
                out,
                r#"    <visual><geometry><mesh filename="{}"/></geometry></visual>"#,
                xml_escape(mesh)
            );
        }
        for c in &link.collisions {
            let geom = match (&c.mesh_ref, c.shape) {
                (
                    Some(file),
                    Shape::Capsule {
                        radius,
                        half_length,
                    },
                ) => format!(
                    r#"<mesh filename="{}" capsule_approx="{radius} {half_length}"/>"#,
                    xml_escape(file)
                ),
                (_, Shape::Sphere { radius }) => format!(r#"<sphere radius="{radius}"/>"#),
                (_, Shape::Box { half_extents: h }) => format!(
                    r#"<box size="{} {} {}"/>"#,
                    h[0] * 2.0,
                    h[1] * 2.0,
                    h[2] * 2.0
                ),
                (
                    _,
                    Shape::Cylinder {
                        radius,
                        half_length,
                    },
                ) => format!(r#"<cylinder radius="{radius}" length="{}"/>"#, half_length * 2.0),
                (
                    _,
                    Shape::Capsule {
                        radius,
                        half_length,
                    },
                ) => format!(r#"<capsule radius="{radius}" length="{}"/>"#, half_length * 2.0),
            };
            let _ = writeln!(
                out,
                "    <collision>{}<geometry>{geom}</geometry></collision>",
                origin_tag(&c.origin)
            );
        }
        let _ = writeln!(out, "  </link>");
    }
    for j in &model.joints {
        let _ = writeln!(
            out,
            r#"  <joint name="{}" type="{}">"#,
            xml_escape(&j.name),
            j.kind.as_str()
        );
        let _ = writeln!(out, r#"    <parent link="{}"/>"#, xml_escape(&j.parent));
        let _ = writeln!(out, r#"    <child link="{}"/>"#, xml_escape(&j.child));
        let _ = writeln!(out, "    {}", origin_tag(&j.origin));
        let a = j.axis;
        let _ = writeln!(out, r#"    <axis xyz="{} {} {}"/>"#, a.x, a.y, a.z);
        if let Some(l) = &j.limits {
            if j.kind == JointKind::Continuous {
                let _ = writeln!(
                    out,
                    r#"    <limit velocity="{}" effort="{}"/>"#,
                    l.velocity, l.effort
                );
            } else {
                let _ = writeln!(
                    out,
                    r#"    <limit lower="{}" upper="{}" velocity="{}" effort="{}"/>"#,
                    l.lower, l.upper, l.velocity, l.effort
                );
            }
        }
        let _ = writeln!(out, "  </joint>");
    }
    let _ = writeln!(out, "</robot>");
    out
}
