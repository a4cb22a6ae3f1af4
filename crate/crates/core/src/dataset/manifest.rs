use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::frame_io::{is_valid_frame_id, labels_path, points_path};
use crate::sensor::SensorConfig;
use crate::{rng, Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const FORMAT_VERSION: u32 = 1;
/// Stream name of world-frame clouds merged from all sensors.
pub const MERGED_STREAM: &str = "merged";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitRole {
    Train,
    Test,
}

/// On-disk index of a dataset.
///
/// `streams` lists the per-sensor (and merged) subdirectories under
/// `points/` and `labels/`. An empty list means the flat layout with files
/// directly in `points/` and `labels/`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub name: String,
    pub format_version: u32,
    pub creation_seed: u64,
    pub frame_ids: Vec<String>,
    pub split_ratio: f64,
    pub split: BTreeMap<String, SplitRole>,
    pub sensors: Vec<SensorConfig>,
    pub streams: Vec<String>,
    /// Stream analysed by default; `None` for the flat layout.
    pub primary_stream: Option<String>,
    pub merged: bool,
    pub min_points: u32,
}

impl DatasetManifest {
    /// Manifest for `frame_ids` with a seeded train/test assignment.
    pub fn new(name: &str, frame_ids: Vec<String>, split_ratio: f64, seed: u64) -> Result<Self> {
        let split = assign_split(&frame_ids, split_ratio, seed)?;
        Ok(DatasetManifest {
            name: name.to_owned(),
            format_version: FORMAT_VERSION,
            creation_seed: seed,
            frame_ids,
            split_ratio,
            split,
            sensors: Vec::new(),
            streams: Vec::new(),
            primary_stream: None,
            merged: false,
            min_points: 1,
        })
    }

    pub fn len(&self) -> usize {
        self.frame_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame_ids.is_empty()
    }

    pub fn primary(&self) -> Option<&str> {
        self.primary_stream.as_deref()
    }

    /// Every directory level a frame must exist in: each stream, or the flat layout.
    pub fn stream_slots(&self) -> Vec<Option<&str>> {
        if self.streams.is_empty() {
            vec![None]
        } else {
            self.streams.iter().map(|s| Some(s.as_str())).collect()
        }
    }

    pub fn count(&self, role: SplitRole) -> usize {
        self.split.values().filter(|&&r| r == role).count()
    }

    /// Structural checks that need no file access.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for id in &self.frame_ids {
            if !is_valid_frame_id(id) {
                return Err(Error::Integrity(format!("malformed frame id {id:?}")));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::Integrity(format!("duplicate frame id {id}")));
            }
        }
        if self.split.len() != self.frame_ids.len() || self.frame_ids.iter().any(|id| !self.split.contains_key(id)) {
            return Err(Error::Integrity("split does not cover exactly the listed frames".into()));
        }
        if !(0.0..=1.0).contains(&self.split_ratio) {
            return Err(Error::Integrity(format!("split ratio {} outside [0, 1]", self.split_ratio)));
        }
        match &self.primary_stream {
            Some(p) if !self.streams.contains(p) => {
                Err(Error::Integrity(format!("primary stream {p:?} not among streams")))
            }
            None if !self.streams.is_empty() => Err(Error::Integrity("streams listed without a primary stream".into())),
            _ => Ok(()),
        }
    }

    /// Frame ids whose point or label file is absent in some stream.
    pub fn missing_frames(&self, root: &Path) -> Vec<String> {
        self.frame_ids
            .iter()
            .filter(|id| {
                self.stream_slots()
                    .iter()
                    .any(|&s| !points_path(root, s, id).is_file() || !labels_path(root, s, id).is_file())
            })
            .cloned()
            .collect()
    }
}

/// Seeded shuffle; the first `round(ratio * n)` frames train, the rest test.
pub fn assign_split(frame_ids: &[String], ratio: f64, seed: u64) -> Result<BTreeMap<String, SplitRole>> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::validation("split_ratio", format!("{ratio} outside [0, 1]")));
    }
    let n_train = (ratio * frame_ids.len() as f64).round() as usize;
    let mut order: Vec<usize> = (0..frame_ids.len()).collect();
    order.shuffle(&mut rng::stream(seed, &[u64::from_le_bytes(*b"split\0\0\0")]));
    Ok(order
        .iter()
        .enumerate()
        .map(|(rank, &i)| {
            let role = if rank < n_train { SplitRole::Train } else { SplitRole::Test };
            (frame_ids[i].clone(), role)
        })
        .collect())
}

pub fn write_manifest(root: &Path, manifest: &DatasetManifest) -> Result<()> {
    manifest.validate()?;
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let path = root.join(MANIFEST_FILE);
    let mut json = serde_json::to_string_pretty(manifest).map_err(|e| Error::Json { path: path.clone(), source: e })?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))
}

/// Reads and validates a manifest, including presence of every frame file.
pub fn read_manifest(root: &Path) -> Result<DatasetManifest> {
    let path = root.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| Error::Json { path, source: e })?;
    manifest.validate()?;
    let missing = manifest.missing_frames(root);
    if !missing.is_empty() {
        return Err(Error::Integrity(format!("missing frames: {}", missing.join(", "))));
    }
    Ok(manifest)
}
