//! Point and label files.
//!
//! Points: raw little-endian `f32` quadruples `(x, y, z, intensity)`, no header.
//! Labels: UTF-8, one box per line,
//! `x y z dx dy dz heading class_name [num_points]`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::geometry::Vec3;
use crate::scene::BoxLabel;
use crate::sensor::{Point, PointCloudFrame};
use crate::{Error, Real, Result};

pub const POINTS_DIR: &str = "points";
pub const LABELS_DIR: &str = "labels";
pub const FEATURES_DIR: &str = "features";
pub const BYTES_PER_POINT: usize = 16;

pub fn is_valid_frame_id(id: &str) -> bool {
    id.len() == 6 && id.bytes().all(|b| b.is_ascii_digit())
}

pub fn frame_id(index: usize) -> String {
    format!("{index:06}")
}

fn check_frame_id(id: &str) -> Result<()> {
    if is_valid_frame_id(id) {
        Ok(())
    } else {
        Err(Error::validation("frame_id", format!("{id:?} is not six digits")))
    }
}

fn stream_dir(root: &Path, kind: &str, stream: Option<&str>) -> PathBuf {
    match stream {
        Some(s) => root.join(kind).join(s),
        None => root.join(kind),
    }
}

pub fn points_path(root: &Path, stream: Option<&str>, frame_id: &str) -> PathBuf {
    stream_dir(root, POINTS_DIR, stream).join(format!("{frame_id}.bin"))
}

pub fn labels_path(root: &Path, stream: Option<&str>, frame_id: &str) -> PathBuf {
    stream_dir(root, LABELS_DIR, stream).join(format!("{frame_id}.txt"))
}

pub fn encode_points<T: Real>(points: &[Point<T>]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(points.len() * BYTES_PER_POINT);
    for p in points {
        for v in [p.position.x, p.position.y, p.position.z, p.intensity] {
            let f = v.to_f32().unwrap_or(f32::NAN);
            buf.extend_from_slice(&f.to_le_bytes());
        }
    }
    buf
}

pub fn decode_points(bytes: &[u8]) -> Result<Vec<Point<f32>>, String> {
    if !bytes.len().is_multiple_of(BYTES_PER_POINT) {
        return Err(format!(
            "truncated: {} bytes is not a multiple of {BYTES_PER_POINT}",
            bytes.len()
        ));
    }
    Ok(bytes
        .chunks_exact(BYTES_PER_POINT)
        .map(|c| {
            let f = |k: usize| f32::from_le_bytes([c[4 * k], c[4 * k + 1], c[4 * k + 2], c[4 * k + 3]]);
            Point::new(f(0), f(1), f(2), f(3))
        })
        .collect())
}

pub fn format_labels(labels: &[BoxLabel]) -> String {
    let mut out = String::new();
    for l in labels {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {} {}",
            l.center.x, l.center.y, l.center.z, l.dims[0], l.dims[1], l.dims[2], l.heading, l.class_name, l.num_points
        );
    }
    out
}

/// Parses label text. The trailing point count is optional and defaults to 0.
pub fn parse_labels(text: &str) -> Result<Vec<BoxLabel>, String> {
    let mut labels = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = n + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(8..=9).contains(&fields.len()) {
            return Err(format!("line {line_no}: expected 8 or 9 fields, found {}", fields.len()));
        }
        let mut nums = [0.0f64; 7];
        for (k, v) in nums.iter_mut().enumerate() {
            *v = fields[k]
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| format!("line {line_no}: field {} {:?} is not a finite number", k + 1, fields[k]))?;
        }
        if nums[3..6].iter().any(|&d| d <= 0.0) {
            return Err(format!("line {line_no}: box dimensions must be positive"));
        }
        let num_points = match fields.get(8) {
            Some(s) => s
                .parse()
                .map_err(|_| format!("line {line_no}: bad point count {s:?}"))?,
            None => 0,
        };
        labels.push(BoxLabel {
            center: Vec3::new(nums[0], nums[1], nums[2]),
            dims: [nums[3], nums[4], nums[5]],
            heading: nums[6],
            class_name: fields[7].to_owned(),
            num_points,
        });
    }
    Ok(labels)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes one frame's point and label files. Coordinates are stored as `f32`.
///
/// `stream` selects a per-sensor subdirectory; `None` uses the flat layout.
pub fn write_frame<T: Real>(
    root: &Path,
    stream: Option<&str>,
    frame_id: &str,
    frame: &PointCloudFrame<T>,
    labels: &[BoxLabel],
) -> Result<()> {
    check_frame_id(frame_id)?;
    write_file(&points_path(root, stream, frame_id), &encode_points(&frame.points))?;
    write_file(&labels_path(root, stream, frame_id), format_labels(labels).as_bytes())
}

pub fn read_points(root: &Path, stream: Option<&str>, frame_id: &str) -> Result<PointCloudFrame<f32>> {
    check_frame_id(frame_id)?;
    let path = points_path(root, stream, frame_id);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let points = decode_points(&bytes).map_err(|r| Error::format(&path, r))?;
    let index = frame_id.parse().expect("validated frame id");
    Ok(PointCloudFrame::new(points, index, stream.unwrap_or(""), 0.0))
}

pub fn read_labels(root: &Path, stream: Option<&str>, frame_id: &str) -> Result<Vec<BoxLabel>> {
    check_frame_id(frame_id)?;
    let path = labels_path(root, stream, frame_id);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    parse_labels(&text).map_err(|r| Error::format(&path, r))
}

pub fn read_frame(
    root: &Path,
    stream: Option<&str>,
    frame_id: &str,
) -> Result<(PointCloudFrame<f32>, Vec<BoxLabel>)> {
    Ok((read_points(root, stream, frame_id)?, read_labels(root, stream, frame_id)?))
}
