//! Frame-level dataset statistics: point density, scene complexity, box volume.
//!
//! "Point density" is points per frame.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{points_path, read_labels, DatasetManifest, BYTES_PER_POINT};
use crate::scene::BoxLabel;
use crate::sensor::PointCloudFrame;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameStats {
    pub point_count: usize,
    pub box_count: usize,
    /// Mean of `dx * dy * dz` over the frame's boxes; 0 without boxes.
    pub mean_box_volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSummary {
    pub frame_count: usize,
    pub point_count: MeanStd,
    pub box_count: MeanStd,
    pub mean_box_volume: MeanStd,
}

/// Per-metric `(a, b)` values scaled by the larger of the two means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizedComparison {
    pub point_count: (f64, f64),
    pub box_count: (f64, f64),
    pub mean_box_volume: (f64, f64),
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn frame_stats_from_counts(point_count: usize, labels: &[BoxLabel]) -> FrameStats {
    let mut volumes: Vec<f64> = labels.iter().map(BoxLabel::volume).collect();
    volumes.sort_by(f64::total_cmp);
    FrameStats {
        point_count,
        box_count: labels.len(),
        mean_box_volume: if volumes.is_empty() { 0.0 } else { mean_of(&volumes) },
    }
}

pub fn frame_stats<T: Real>(frame: &PointCloudFrame<T>, labels: &[BoxLabel]) -> FrameStats {
    frame_stats_from_counts(frame.len(), labels)
}

/// Mean and population stddev. Values are sorted first so the result does not
/// depend on input order.
pub fn mean_std(values: &[f64]) -> MeanStd {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mean = mean_of(&v);
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    dev.sort_by(f64::total_cmp);
    MeanStd {
        mean,
        std: mean_of(&dev).sqrt(),
    }
}

pub fn summarize_frames(frames: &[FrameStats]) -> Result<DatasetSummary> {
    if frames.is_empty() {
        return Err(Error::validation("dataset", "no frames to summarize"));
    }
    let col = |f: fn(&FrameStats) -> f64| mean_std(&frames.iter().map(f).collect::<Vec<_>>());
    Ok(DatasetSummary {
        frame_count: frames.len(),
        point_count: col(|s| s.point_count as f64),
        box_count: col(|s| s.box_count as f64),
        mean_box_volume: col(|s| s.mean_box_volume),
    })
}

/// Statistics of one stored frame; the point count comes from the file size.
pub fn stored_frame_stats(root: &Path, stream: Option<&str>, frame_id: &str) -> Result<FrameStats> {
    let path = points_path(root, stream, frame_id);
    let len = std::fs::metadata(&path).map_err(|e| Error::io(&path, e))?.len() as usize;
    if !len.is_multiple_of(BYTES_PER_POINT) {
        return Err(Error::format(&path, format!("truncated: {len} bytes")));
    }
    let labels = read_labels(root, stream, frame_id)?;
    Ok(frame_stats_from_counts(len / BYTES_PER_POINT, &labels))
}

/// Summary over every frame of the manifest's primary stream.
pub fn summarize(root: &Path, manifest: &DatasetManifest) -> Result<DatasetSummary> {
    let stream = manifest.primary();
    let frames = manifest
        .frame_ids
        .iter()
        .map(|id| stored_frame_stats(root, stream, id))
        .collect::<Result<Vec<_>>>()?;
    summarize_frames(&frames)
}

fn normalize_pair(a: f64, b: f64) -> (f64, f64) {
    let m = a.max(b);
    if m > 0.0 {
        (a / m, b / m)
    } else {
        (0.0, 0.0)
    }
}

pub fn normalized_comparison(a: &DatasetSummary, b: &DatasetSummary) -> NormalizedComparison {
    NormalizedComparison {
        point_count: normalize_pair(a.point_count.mean, b.point_count.mean),
        box_count: normalize_pair(a.box_count.mean, b.box_count.mean),
        mean_box_volume: normalize_pair(a.mean_box_volume.mean, b.mean_box_volume.mean),
    }
}
