use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{Mat3, Vec3};
use crate::{Error, Result};

pub const DEFAULT_NOISE_STDDEV: f64 = 0.02;
pub const DEFAULT_DROPOUT_PROB: f64 = 0.0;

/// Parameters of a spinning multi-channel LiDAR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub name: String,
    pub channels: u32,
    pub upper_fov_deg: f64,
    pub lower_fov_deg: f64,
    pub points_per_second: f64,
    pub max_range_m: f64,
    pub rotation_hz: f64,
    pub noise_stddev_m: f64,
    pub dropout_prob: f64,
}

impl SensorSpec {
    /// Spec with the default noise model (2 cm range noise, no dropout).
    pub fn new(
        name: &str,
        channels: u32,
        upper_fov_deg: f64,
        lower_fov_deg: f64,
        points_per_second: f64,
        max_range_m: f64,
        rotation_hz: f64,
    ) -> Self {
        SensorSpec {
            name: name.to_owned(),
            channels,
            upper_fov_deg,
            lower_fov_deg,
            points_per_second,
            max_range_m,
            rotation_hz,
            noise_stddev_m: DEFAULT_NOISE_STDDEV,
            dropout_prob: DEFAULT_DROPOUT_PROB,
        }
    }

    pub fn with_noise(mut self, noise_stddev_m: f64, dropout_prob: f64) -> Self {
        self.noise_stddev_m = noise_stddev_m;
        self.dropout_prob = dropout_prob;
        self
    }

    pub fn hesai_pandar64(rotation_hz: f64) -> Self {
        SensorSpec::new("pandar64", 64, 15.0, -25.0, 2.60e6, 200.0, rotation_hz)
    }

    pub fn velodyne_hdl64e(rotation_hz: f64) -> Self {
        SensorSpec::new("hdl64e", 64, 1.9, -24.6, 4.97e6, 120.0, rotation_hz)
    }

    pub fn hesai_pandar_qt(rotation_hz: f64) -> Self {
        SensorSpec::new("pandarqt", 64, 52.1, -52.1, 0.87e6, 20.0, rotation_hz)
    }

    pub fn velodyne_vlp16(rotation_hz: f64) -> Self {
        SensorSpec::new("vlp16", 16, 15.0, -15.0, 0.68e6, 100.0, rotation_hz)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, reason: String| Err(Error::validation(field, reason));
        if self.name.is_empty() {
            return fail("name", "must not be empty".into());
        }
        if self.channels < 1 {
            return fail("channels", "must be at least 1".into());
        }
        let fovs_ok = self.upper_fov_deg.is_finite() && self.lower_fov_deg.is_finite();
        // A single channel may sit at one fixed elevation.
        if !fovs_ok
            || self.upper_fov_deg < self.lower_fov_deg
            || (self.channels > 1 && self.upper_fov_deg == self.lower_fov_deg)
        {
            return fail(
                "upper_fov_deg",
                format!(
                    "{} must exceed lower_fov_deg {}",
                    self.upper_fov_deg, self.lower_fov_deg
                ),
            );
        }
        if self.upper_fov_deg > 90.0 || self.lower_fov_deg < -90.0 {
            return fail("upper_fov_deg", "field of view must lie within [-90, 90]".into());
        }
        if !(self.rotation_hz.is_finite() && self.rotation_hz > 0.0) {
            return fail("rotation_hz", format!("{} must be > 0", self.rotation_hz));
        }
        let min_rate = f64::from(self.channels) * self.rotation_hz;
        if !(self.points_per_second.is_finite() && self.points_per_second >= min_rate) {
            return fail(
                "points_per_second",
                format!("{} below channels x rotation_hz = {min_rate}", self.points_per_second),
            );
        }
        if !(self.max_range_m.is_finite() && self.max_range_m > 0.0) {
            return fail("max_range_m", format!("{} must be > 0", self.max_range_m));
        }
        if !(self.noise_stddev_m.is_finite() && self.noise_stddev_m >= 0.0) {
            return fail("noise_stddev_m", format!("{} must be >= 0", self.noise_stddev_m));
        }
        if !(0.0..1.0).contains(&self.dropout_prob) {
            return fail("dropout_prob", format!("{} must lie in [0, 1)", self.dropout_prob));
        }
        Ok(())
    }
}

/// Sensor placement: world-frame center plus yaw/pitch/roll tilt in degrees.
///
/// The rotation is `Rz(yaw) * Ry(pitch) * Rx(roll)`: yaw first, then pitch
/// and roll about the already-rotated axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorPose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub roll_deg: f64,
}

impl Default for SensorPose {
    fn default() -> Self {
        SensorPose::at(Vec3::zero())
    }
}

impl SensorPose {
    pub fn at(center: Vec3<f64>) -> Self {
        SensorPose {
            x: center.x,
            y: center.y,
            z: center.z,
            yaw_deg: 0.0,
            pitch_deg: 0.0,
            roll_deg: 0.0,
        }
    }

    pub fn with_tilt(mut self, yaw_deg: f64, pitch_deg: f64, roll_deg: f64) -> Self {
        self.yaw_deg = yaw_deg;
        self.pitch_deg = pitch_deg;
        self.roll_deg = roll_deg;
        self
    }

    pub fn center(&self) -> Vec3<f64> {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn rotation(&self) -> Mat3<f64> {
        Mat3::rot_z(self.yaw_deg.to_radians())
            .mul_mat(&Mat3::rot_y(self.pitch_deg.to_radians()))
            .mul_mat(&Mat3::rot_x(self.roll_deg.to_radians()))
    }

    pub fn to_world(&self, p: Vec3<f64>) -> Vec3<f64> {
        self.rotation().mul_vec(p) + self.center()
    }

    pub fn to_sensor(&self, p: Vec3<f64>) -> Vec3<f64> {
        self.rotation().transpose().mul_vec(p - self.center())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center().is_finite() {
            return Err(Error::validation("pose", "center must be finite"));
        }
        for (field, a) in [
            ("pose.yaw_deg", self.yaw_deg),
            ("pose.pitch_deg", self.pitch_deg),
            ("pose.roll_deg", self.roll_deg),
        ] {
            if !(-180.0..=180.0).contains(&a) {
                return Err(Error::validation(field, format!("{a} outside [-180, 180]")));
            }
        }
        Ok(())
    }
}

/// One entry of the sensor configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    pub name: String,
    pub channels: u32,
    pub upper_fov_deg: f64,
    pub lower_fov_deg: f64,
    pub points_per_second: f64,
    pub max_range_m: f64,
    pub rotation_hz: f64,
    #[serde(default = "default_noise")]
    pub noise_stddev_m: f64,
    #[serde(default)]
    pub dropout_prob: f64,
    pub pose: SensorPose,
}

fn default_noise() -> f64 {
    DEFAULT_NOISE_STDDEV
}

impl SensorConfig {
    pub fn new(spec: &SensorSpec, pose: SensorPose) -> Self {
        SensorConfig {
            name: spec.name.clone(),
            channels: spec.channels,
            upper_fov_deg: spec.upper_fov_deg,
            lower_fov_deg: spec.lower_fov_deg,
            points_per_second: spec.points_per_second,
            max_range_m: spec.max_range_m,
            rotation_hz: spec.rotation_hz,
            noise_stddev_m: spec.noise_stddev_m,
            dropout_prob: spec.dropout_prob,
            pose,
        }
    }

    pub fn spec(&self) -> SensorSpec {
        SensorSpec {
            name: self.name.clone(),
            channels: self.channels,
            upper_fov_deg: self.upper_fov_deg,
            lower_fov_deg: self.lower_fov_deg,
            points_per_second: self.points_per_second,
            max_range_m: self.max_range_m,
            rotation_hz: self.rotation_hz,
            noise_stddev_m: self.noise_stddev_m,
            dropout_prob: self.dropout_prob,
        }
    }

    pub fn pose(&self) -> SensorPose {
        self.pose
    }
}

/// Parses and validates a sensor configuration array.
///
/// Validation errors carry a field path such as `sensors[1].channels`.
pub fn parse_sensor_configs(json: &str) -> std::result::Result<Vec<SensorConfig>, Error> {
    let configs: Vec<SensorConfig> = serde_json::from_str(json)
        .map_err(|e| Error::validation("sensors", e.to_string()))?;
    if configs.is_empty() {
        return Err(Error::validation("sensors", "at least one sensor required"));
    }
    let mut names = std::collections::HashSet::new();
    for (i, c) in configs.iter().enumerate() {
        let prefix = |e: Error| match e {
            Error::Validation { field, reason } => Error::Validation {
                field: format!("sensors[{i}].{field}"),
                reason,
            },
            other => other,
        };
        c.spec().validate().map_err(prefix)?;
        c.pose.validate().map_err(prefix)?;
        if c.name == "merged" || c.name.contains(['/', '\\']) || c.name.starts_with('.') {
            return Err(Error::validation(
                format!("sensors[{i}].name"),
                format!("{:?} is not usable as a directory name", c.name),
            ));
        }
        if !names.insert(c.name.as_str()) {
            return Err(Error::validation(
                format!("sensors[{i}].name"),
                format!("duplicate sensor name {:?}", c.name),
            ));
        }
    }
    Ok(configs)
}

pub fn load_sensor_configs(path: &Path) -> Result<Vec<SensorConfig>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sensor_configs(&text)
}
