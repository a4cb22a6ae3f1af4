use std::path::{Path, PathBuf};
use std::time::Instant;

use dt_lidar_core::dataset::{frame_id, write_frame, write_manifest, DatasetManifest, MERGED_STREAM};
use dt_lidar_core::geometry::{Bvh, RayCast, SceneLayers};
use dt_lidar_core::rng::derive_seed;
use dt_lidar_core::scene::{
    actor_meshes_with_templates, generate_labels, spawn_actors, step_actors, ActorInstance, SceneConfig,
};
use dt_lidar_core::sensor::{
    derive_scan_pattern, load_sensor_configs, merge_frames, simulate_scan, PointCloudFrame, SensorConfig, SensorPose,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

const SEED_SPAWN: u64 = 1;
const SEED_SENSOR: u64 = 2;

/// Settings of one `simulate` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scene: PathBuf,
    pub sensors: PathBuf,
    pub frames: usize,
    pub dt: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub merge: bool,
    pub split: f64,
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.frames < 1 {
            return Err(CliError::usage("frames", "must be >= 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(CliError::usage("dt", format!("{} must be > 0", self.dt)));
        }
        if !(0.0..=1.0).contains(&self.split) {
            return Err(CliError::usage("split", format!("{} outside [0, 1]", self.split)));
        }
        if self.frames > 1_000_000 {
            return Err(CliError::usage("frames", "six-digit frame ids allow at most 1000000 frames"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimulationSummary {
    pub manifest: DatasetManifest,
    pub rays_cast: u64,
    pub seconds: f64,
}

impl SimulationSummary {
    pub fn frames_per_second(&self) -> f64 {
        self.manifest.len() as f64 / self.seconds.max(1e-9)
    }

    pub fn rays_per_second(&self) -> f64 {
        self.rays_cast as f64 / self.seconds.max(1e-9)
    }
}

fn dataset_name(out: &Path) -> String {
    out.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into())
}

struct FrameJob<'a> {
    index: usize,
    actors: &'a [ActorInstance],
}

/// Spawns actors, steps them `dt` between frames, scans every sensor each
/// frame and writes points, labels and the manifest under `cfg.out`.
pub fn cmd_simulate(cfg: &RunConfig) -> CliResult<SimulationSummary> {
    cfg.validate()?;
    let scene = SceneConfig::load(&cfg.scene)?;
    let sensors: Vec<SensorConfig> = load_sensor_configs(&cfg.sensors)?;
    let templates = scene.load_class_templates()?;
    let static_meshes = scene.load_static_meshes()?;
    let static_bvh = if static_meshes.iter().any(|m| !m.triangles.is_empty()) {
        Some(Bvh::build(&static_meshes)?)
    } else {
        None
    };

    let start = Instant::now();
    let mut actor_states = Vec::with_capacity(cfg.frames);
    let mut actors = spawn_actors(
        &scene.lanes,
        &scene.classes,
        scene.target_actor_count,
        derive_seed(cfg.seed, &[SEED_SPAWN]),
    )?;
    for _ in 0..cfg.frames {
        let next = step_actors(&actors, &scene.lanes, cfg.dt);
        actor_states.push(std::mem::replace(&mut actors, next));
    }

    let flat = sensors.len() == 1 && !cfg.merge;
    let mut streams: Vec<String> = if flat { Vec::new() } else { sensors.iter().map(|s| s.name.clone()).collect() };
    if cfg.merge {
        streams.push(MERGED_STREAM.into());
    }
    let primary = if flat {
        None
    } else if cfg.merge {
        Some(MERGED_STREAM.to_string())
    } else {
        Some(sensors[0].name.clone())
    };

    let rays_per_frame: u64 = sensors
        .iter()
        .map(|s| derive_scan_pattern(&s.spec()).map(|p| p.rays_per_rev() as u64))
        .sum::<dt_lidar_core::Result<u64>>()?;

    let jobs: Vec<FrameJob> = actor_states
        .iter()
        .enumerate()
        .map(|(index, actors)| FrameJob { index, actors })
        .collect();
    jobs.par_iter()
        .map(|job| simulate_frame(cfg, &scene, &sensors, &templates, static_bvh.as_ref(), job, flat))
        .collect::<CliResult<Vec<()>>>()?;

    let frame_ids: Vec<String> = (0..cfg.frames).map(frame_id).collect();
    let mut manifest = DatasetManifest::new(&dataset_name(&cfg.out), frame_ids, cfg.split, cfg.seed)?;
    manifest.sensors = sensors;
    manifest.streams = streams;
    manifest.primary_stream = primary;
    manifest.merged = cfg.merge;
    manifest.min_points = scene.min_points;
    write_manifest(&cfg.out, &manifest)?;

    Ok(SimulationSummary {
        manifest,
        rays_cast: rays_per_frame * cfg.frames as u64,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn simulate_frame(
    cfg: &RunConfig,
    scene: &SceneConfig,
    sensors: &[SensorConfig],
    templates: &std::collections::HashMap<String, dt_lidar_core::Mesh>,
    static_bvh: Option<&dt_lidar_core::Bvh>,
    job: &FrameJob,
    flat: bool,
) -> CliResult<()> {
    let actor_bvh = if job.actors.is_empty() {
        None
    } else {
        Some(Bvh::build(&actor_meshes_with_templates(job.actors, templates))?)
    };
    let layers: Vec<&dt_lidar_core::Bvh> = static_bvh.into_iter().chain(actor_bvh.as_ref()).collect();
    let world = SceneLayers::new(&layers);
    let id = frame_id(job.index);
    let timestamp = job.index as f64 * cfg.dt;

    let mut frames = Vec::with_capacity(sensors.len());
    for (k, sensor) in sensors.iter().enumerate() {
        let mut frame = scan(&world, sensor, job.index as u64, derive_seed(cfg.seed, &[SEED_SENSOR, k as u64]))?;
        frame.timestamp = timestamp;
        let stored: PointCloudFrame<f32> = frame.cast();
        let labels = generate_labels(&stored, &sensor.pose, job.actors, scene.min_points);
        let stream = (!flat).then_some(sensor.name.as_str());
        write_frame(&cfg.out, stream, &id, &stored, &labels)?;
        frames.push(frame);
    }

    if cfg.merge {
        let poses: Vec<SensorPose> = sensors.iter().map(|s| s.pose).collect();
        let merged: PointCloudFrame<f32> = merge_frames(&frames, &poses)?.cast();
        let labels = generate_labels(&merged, &SensorPose::default(), job.actors, scene.min_points);
        write_frame(&cfg.out, Some(MERGED_STREAM), &id, &merged, &labels)?;
    }
    Ok(())
}

fn scan<S: RayCast<f64> + Sync>(
    world: &S,
    sensor: &SensorConfig,
    frame_index: u64,
    seed: u64,
) -> CliResult<PointCloudFrame<f64>> {
    Ok(simulate_scan(world, &sensor.spec(), &sensor.pose, frame_index, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig {
            scene: "scene.json".into(),
            sensors: "sensors.json".into(),
            frames: 10,
            dt: 0.1,
            seed: 0,
            out: "out/ds".into(),
            merge: false,
            split: 0.8,
        }
    }

    #[test]
    fn validation() {
        assert!(cfg().validate().is_ok());
        for (bad, field) in [
            (RunConfig { frames: 0, ..cfg() }, "frames"),
            (RunConfig { frames: 1_000_001, ..cfg() }, "frames"),
            (RunConfig { dt: 0.0, ..cfg() }, "dt"),
            (RunConfig { dt: f64::NAN, ..cfg() }, "dt"),
            (RunConfig { split: -0.1, ..cfg() }, "split"),
        ] {
            let e = bad.validate().unwrap_err();
            assert_eq!(e.exit_code(), 1);
            assert!(e.to_string().contains(field), "{e}");
        }
    }

    #[test]
    fn name_from_output_directory() {
        assert_eq!(dataset_name(Path::new("out/ds")), "ds");
        assert_eq!(dataset_name(Path::new("/")), "dataset");
    }
}
