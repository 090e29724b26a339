use serde::{Deserialize, Serialize};

use super::parse::tree_root;
use super::RobotModel;
use crate::math::orthonormality_error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub element: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    fn error(&mut self, element: &str, message: String) {
        self.findings.push(Finding {
            severity: Severity::Error,
            element: element.to_string(),
            message,
        });
    }

    fn warning(&mut self, element: &str, message: String) {
        self.findings.push(Finding {
            severity: Severity::Warning,
            element: element.to_string(),
            message,
        });
    }
}

const SYMMETRY_TOLERANCE: f64 = 1e-12;
const AXIS_TOLERANCE: f64 = 1e-9;

/// Checks every model invariant and reports instead of failing.
pub fn validate_model(model: &RobotModel) -> ValidationReport {
    let mut report = ValidationReport::default();

    match tree_root(&model.links, &model.joints) {
        Ok(root) if root != model.root_link => report.error(
            &model.root_link,
            format!("declared root `{}` but the tree is rooted at `{root}`", model.root_link),
        ),
        Ok(_) => {}
        Err(e) => report.error(&model.name, e.to_string()),
    }

    for link in &model.links {
        if let Some(i) = &link.inertial {
            if !(i.mass >= 0.0) {
                report.error(&link.name, format!("negative or invalid mass {}", i.mass));
            }
            let asym = (i.inertia - i.inertia.transpose()).abs().max();
            if asym > SYMMETRY_TOLERANCE {
                report.error(&link.name, format!("inertia matrix not symmetric (|I - I^T| = {asym:e})"));
            }
            if i.mass == 0.0 && i.inertia.abs().max() > 0.0 {
                report.warning(&link.name, "zero mass with nonzero inertia".to_string());
            }
            if orthonormality_error(&i.center_of_mass.rotation) > 1e-9 {
                report.error(&link.name, "inertial origin rotation not orthonormal".to_string());
            }
        }
        for c in &link.collisions {
            if !c.shape.is_valid() {
                report.error(
                    &link.name,
                    format!("{} collision shape has a non-positive dimension", c.shape.kind_name()),
                );
            }
        }
    }

    for j in &model.joints {
        if orthonormality_error(&j.origin.rotation) > 1e-9 {
            report.error(&j.name, "origin rotation not orthonormal".to_string());
        }
        if !j.kind.is_movable() {
            if j.limits.is_some() {
                report.warning(&j.name, "fixed joint carries limits".to_string());
            }
            continue;
        }
        let n = j.axis.norm();
        if (n - 1.0).abs() > AXIS_TOLERANCE {
            report.error(&j.name, format!("axis norm {n} is not 1"));
        }
        match &j.limits {
            None => report.error(&j.name, "movable joint without limits".to_string()),
            Some(l) => {
                if l.lower.is_nan() || l.upper.is_nan() || l.lower > l.upper {
                    report.error(&j.name, format!("lower {} > upper {}", l.lower, l.upper));
                }
                if !(l.velocity > 0.0) {
                    report.error(&j.name, format!("velocity limit {} must be positive", l.velocity));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::urdf::parse_urdf;

    const MODEL: &str = r#"<robot name="r">
      <link name="base"><inertial><mass value="1"/><inertia ixx="1" ixy="0" ixz="0" iyy="1" iyz="0" izz="1"/></inertial></link>
      <link name="arm"/>
      <joint name="j" type="revolute"><parent link="base"/><child link="arm"/>
        <axis xyz="0 0 1"/><limit lower="-1" upper="1" velocity="1" effort="1"/></joint>
    </robot>"#;

    #[test]
    fn valid_model_has_no_findings() {
        let m = parse_urdf(MODEL).unwrap();
        assert!(validate_model(&m).is_clean());
    }

    #[test]
    fn inverted_limits_give_one_error() {
        let mut m = parse_urdf(MODEL).unwrap();
        let l = m.joints[0].limits.as_mut().unwrap();
        l.lower = 2.0;
        let r = validate_model(&m);
        assert_eq!(r.findings.len(), 1);
        assert_eq!(r.findings[0].severity, Severity::Error);
        assert_eq!(r.findings[0].element, "j");
    }

    #[test]
    fn massless_link_with_inertia_warns() {
        let m = parse_urdf(&MODEL.replace(r#"<mass value="1"/>"#, r#"<mass value="0"/>"#)).unwrap();
        let r = validate_model(&m);
        assert_eq!(r.findings.len(), 1);
        assert_eq!(r.findings[0].severity, Severity::Warning);
        assert!(!r.has_errors());
    }

    #[test]
    fn asymmetric_inertia_is_an_error() {
        let mut m = parse_urdf(MODEL).unwrap();
        m.links[0].inertial.as_mut().unwrap().inertia[(0, 1)] = 0.5;
        assert!(validate_model(&m).has_errors());
    }

    #[test]
    fn json_shape() {
        let mut m = parse_urdf(MODEL).unwrap();
        m.joints[0].limits.as_mut().unwrap().velocity = 0.0;
        let v: serde_json::Value = serde_json::from_str(&validate_model(&m).to_json()).unwrap();
        assert_eq!(v["findings"][0]["severity"], "error");
        assert_eq!(v["findings"][0]["element"], "j");
        assert!(v["findings"][0]["message"].is_string());
    }
}
