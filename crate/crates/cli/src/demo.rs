//! Writes a small self-contained intersection scene for trying the pipeline.

use std::path::{Path, PathBuf};

use dt_lidar_core::geometry::{to_obj, TriangleMesh, Vec3};
use dt_lidar_core::scene::{ActorClass, LanePolyline, SceneConfig, StaticMeshRef};
use dt_lidar_core::sensor::{SensorConfig, SensorPose, SensorSpec};

use crate::error::{CliError, CliResult};

/// Knobs of the generated scene.
#[derive(Debug, Clone)]
pub struct DemoOptions {
    pub sensor_height: f64,
    pub actor_count: usize,
    /// Spawn weights for car, truck, pedestrian.
    pub class_weights: [f64; 3],
    pub sensor: SensorSpec,
    pub min_points: u32,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            sensor_height: 1.8,
            actor_count: 12,
            class_weights: [0.6, 0.15, 0.25],
            sensor: SensorSpec::velodyne_vlp16(10.0),
            min_points: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DemoFiles {
    pub scene: PathBuf,
    pub sensors: PathBuf,
}

const GROUND_HALF: f64 = 80.0;

fn buildings() -> TriangleMesh<f64> {
    // Four blocks, one in each quadrant of the intersection.
    let blocks = [
        ([12.0, 12.0, 0.0], [40.0, 30.0, 12.0]),
        ([-45.0, 10.0, 0.0], [-12.0, 28.0, 8.0]),
        ([-35.0, -40.0, 0.0], [-12.0, -12.0, 20.0]),
        ([14.0, -30.0, 0.0], [30.0, -12.0, 6.0]),
    ];
    let mut mesh = TriangleMesh::new(Vec::new(), Vec::new(), 1);
    for (lo, hi) in blocks {
        let b = TriangleMesh::cuboid(Vec3::new(lo[0], lo[1], lo[2]), Vec3::new(hi[0], hi[1], hi[2]), 1);
        let base = mesh.vertices.len() as u32;
        mesh.vertices.extend(b.vertices);
        mesh.triangles
            .extend(b.triangles.iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
    }
    mesh
}

pub fn demo_scene(opts: &DemoOptions) -> SceneConfig {
    let lane = |a: [f64; 2], b: [f64; 2]| LanePolyline {
        waypoints: vec![[a[0], a[1], 0.0], [b[0], b[1], 0.0]],
        width: 3.5,
    };
    let [w_car, w_truck, w_ped] = opts.class_weights;
    SceneConfig {
        static_meshes: vec![
            StaticMeshRef { path: "ground.obj".into(), scale: 1.0 },
            StaticMeshRef { path: "buildings.obj".into(), scale: 1.0 },
        ],
        lanes: vec![
            lane([-70.0, -2.0], [70.0, -2.0]),
            lane([70.0, 2.0], [-70.0, 2.0]),
            lane([2.0, -70.0], [2.0, 70.0]),
            lane([-2.0, 70.0], [-2.0, -70.0]),
            lane([-70.0, -8.0], [70.0, -8.0]),
            lane([8.0, 70.0], [8.0, -70.0]),
        ],
        classes: vec![
            ActorClass::new("Car", [4.5, 1.9, 1.6], [0.3, 0.1, 0.1], w_car, [5.0, 14.0]),
            ActorClass::new("Truck", [9.0, 2.5, 3.4], [1.0, 0.15, 0.3], w_truck, [4.0, 10.0]),
            ActorClass::new("Pedestrian", [0.6, 0.6, 1.75], [0.1, 0.1, 0.1], w_ped, [0.8, 1.8]),
        ],
        target_actor_count: opts.actor_count,
        min_points: opts.min_points,
    }
}

pub fn demo_sensors(opts: &DemoOptions) -> Vec<SensorConfig> {
    vec![SensorConfig::new(
        &opts.sensor,
        SensorPose::at(Vec3::new(-5.0, -5.0, opts.sensor_height)),
    )]
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("config serializes");
    s.push('\n');
    s
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes `scene.json`, `sensors.json` and the OBJ files into `dir`.
pub fn write_demo(dir: &Path, opts: &DemoOptions) -> CliResult<DemoFiles> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write(&dir.join("ground.obj"), &to_obj(&TriangleMesh::ground_quad(GROUND_HALF, 0.0, 0)))?;
    write(&dir.join("buildings.obj"), &to_obj(&buildings()))?;
    let files = DemoFiles {
        scene: dir.join("scene.json"),
        sensors: dir.join("sensors.json"),
    };
    write(&files.scene, &pretty(&demo_scene(opts)))?;
    write(&files.sensors, &pretty(&demo_sensors(opts)))?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn written_configs_load_back() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_demo(dir.path(), &DemoOptions::default()).unwrap();
        let scene = SceneConfig::load(&files.scene).unwrap();
        let expected = demo_scene(&DemoOptions::default());
        // Mesh paths come back resolved against the scene file's directory.
        assert_eq!((&scene.lanes, &scene.classes), (&expected.lanes, &expected.classes));
        assert!(scene.static_meshes[0].path.starts_with(dir.path()));
        let meshes = scene.load_static_meshes().unwrap();
        assert_eq!(meshes[0].triangles.len(), 2);
        assert_eq!(meshes[1].triangles.len(), 4 * 12);
        let sensors = dt_lidar_core::sensor::load_sensor_configs(&files.sensors).unwrap();
        assert_eq!(sensors.len(), 1);
        assert_eq!(sensors[0].pose.z, 1.8);
    }

    #[test]
    fn options_shape_the_scene() {
        let opts = DemoOptions { actor_count: 3, class_weights: [0.0, 0.0, 1.0], ..DemoOptions::default() };
        let scene = demo_scene(&opts);
        assert_eq!(scene.target_actor_count, 3);
        assert_eq!(scene.classes[2].spawn_weight, 1.0);
        assert!(scene.validate().is_ok());
    }
}
