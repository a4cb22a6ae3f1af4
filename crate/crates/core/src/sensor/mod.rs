//! Spinning multi-channel LiDAR: spec, scan pattern and revolution simulation.
//!
//! Sensor frame convention: x forward, y left, z up. A ray with elevation `e`
//! and azimuth `a` points along `(cos e cos a, cos e sin a, sin e)`.

mod pattern;
mod simulate;
mod spec;

pub use pattern::{derive_scan_pattern, steps_per_revolution, ScanPattern};
pub use simulate::{merge_frames, simulate_scan, Point, PointCloudFrame};
pub use spec::{
    load_sensor_configs, parse_sensor_configs, SensorConfig, SensorPose, SensorSpec,
    DEFAULT_DROPOUT_PROB, DEFAULT_NOISE_STDDEV,
};
