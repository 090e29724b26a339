use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{WorkspaceCloud, WorkspaceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Ply,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ply" => Ok(Self::Ply),
            "csv" => Ok(Self::Csv),
            _ => Err(format!("unknown export format `{s}`")),
        }
    }
}

/// Red at `min` (the lowest normalized value in the cloud), green at 1.0,
/// linear in between.
pub fn color_for(w_norm: f64, min: f64) -> [u8; 3] {
    let t = if min < 1.0 {
        ((w_norm - min) / (1.0 - min)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    [
        (255.0 * (1.0 - t)).round() as u8,
        (255.0 * t).round() as u8,
        0,
    ]
}

fn norms(cloud: &WorkspaceCloud) -> Result<Vec<f64>, WorkspaceError> {
    cloud
        .samples
        .iter()
        .map(|s| s.w_norm.ok_or(WorkspaceError::Unnormalized))
        .collect()
}

pub fn to_ply_string(cloud: &WorkspaceCloud) -> Result<String, WorkspaceError> {
    let w = norms(cloud)?;
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = String::from("ply\nformat ascii 1.0\n");
    for (k, v) in cloud.header_entries() {
        let _ = writeln!(out, "comment {k}: {v}");
    }
    let _ = writeln!(out, "element vertex {}", cloud.len());
    out.push_str(
        "property double x\nproperty double y\nproperty double z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
    );
    for (s, &wn) in cloud.samples.iter().zip(&w) {
        let [r, g, b] = color_for(wn, min);
        let [x, y, z] = s.position;
        let _ = writeln!(out, "{x} {y} {z} {r} {g} {b}");
    }
    Ok(out)
}

pub fn to_csv_string(cloud: &WorkspaceCloud) -> Result<String, WorkspaceError> {
    let w = norms(cloud)?;
    let mut out = String::new();
    for (k, v) in cloud.header_entries() {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str("x,y,z");
    for i in 1..=cloud.joint_names.len() {
        let _ = write!(out, ",q{i}");
    }
    out.push_str(",w_raw,w_norm\n");
    for (s, wn) in cloud.samples.iter().zip(w) {
        let [x, y, z] = s.position;
        let _ = write!(out, "{x},{y},{z}");
        for q in &s.q {
            let _ = write!(out, ",{q}");
        }
        let _ = writeln!(out, ",{},{wn}", s.w_raw);
    }
    Ok(out)
}

pub fn export_cloud(cloud: &WorkspaceCloud, format: ExportFormat, path: impl AsRef<Path>) -> Result<(), WorkspaceError> {
    let text = match format {
        ExportFormat::Ply => to_ply_string(cloud)?,
        ExportFormat::Csv => to_csv_string(cloud)?,
    };
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| WorkspaceError::Io(format!("{}: {e}", path.display())))
}
