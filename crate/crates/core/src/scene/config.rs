use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::actor::prefix;
use super::{ActorClass, LanePolyline};
use crate::geometry::{load_obj, TriangleMesh};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticMeshRef {
    pub path: PathBuf,
    /// Multiplies every vertex coordinate (e.g. 0.01 for centimeter units).
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

fn one() -> u32 {
    1
}

/// Scene description file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub static_meshes: Vec<StaticMeshRef>,
    pub lanes: Vec<LanePolyline>,
    pub classes: Vec<ActorClass>,
    pub target_actor_count: usize,
    #[serde(default = "one")]
    pub min_points: u32,
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lanes.is_empty() {
            return Err(Error::validation("lanes", "at least one lane required"));
        }
        for (i, lane) in self.lanes.iter().enumerate() {
            lane.validate().map_err(|e| prefix(e, &format!("lanes[{i}]")))?;
        }
        for (i, class) in self.classes.iter().enumerate() {
            class.validate().map_err(|e| prefix(e, &format!("classes[{i}]")))?;
        }
        if !self.classes.iter().any(|c| c.spawn_weight > 0.0) {
            return Err(Error::validation("classes", "no class with positive spawn_weight"));
        }
        for (i, m) in self.static_meshes.iter().enumerate() {
            if !(m.scale.is_finite() && m.scale > 0.0) {
                return Err(Error::validation(format!("static_meshes[{i}].scale"), "must be > 0"));
            }
        }
        Ok(())
    }

    /// Parses a scene file; relative mesh paths are resolved against `base_dir`.
    pub fn parse(json: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: SceneConfig =
            serde_json::from_str(json).map_err(|e| Error::validation("scene", e.to_string()))?;
        cfg.validate()?;
        for m in &mut cfg.static_meshes {
            if m.path.is_relative() {
                m.path = base_dir.join(&m.path);
            }
        }
        for c in &mut cfg.classes {
            if let Some(p) = &c.mesh {
                if Path::new(p).is_relative() {
                    c.mesh = Some(base_dir.join(p).to_string_lossy().into_owned());
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SceneConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Loads static meshes; mesh `i` is tagged with object id `i`.
    pub fn load_static_meshes(&self) -> Result<Vec<TriangleMesh<f64>>> {
        self.static_meshes
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mesh = load_obj(&m.path, m.scale, i as u32)?;
                mesh.validate()?;
                Ok(mesh)
            })
            .collect()
    }

    /// Template meshes for classes that override the default box geometry.
    pub fn load_class_templates(&self) -> Result<HashMap<String, TriangleMesh<f64>>> {
        let mut out = HashMap::new();
        for c in &self.classes {
            if let Some(p) = &c.mesh {
                out.insert(c.name.clone(), load_obj(Path::new(p), 1.0, 0)?);
            }
        }
        Ok(out)
    }
}
