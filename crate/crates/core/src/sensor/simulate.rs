use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::{derive_scan_pattern, SensorPose, SensorSpec};
use crate::geometry::{Mat3, Ray, RayCast, Vec3};
use crate::{rng, Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub position: Vec3<T>,
    pub intensity: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T, z: T, intensity: T) -> Self {
        Point {
            position: Vec3::new(x, y, z),
            intensity,
        }
    }
}

/// One revolution of returns, expressed in the emitting sensor's frame
/// (or the world frame for merged frames).
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloudFrame<T> {
    pub points: Vec<Point<T>>,
    pub frame_index: u64,
    pub sensor_name: String,
    pub timestamp: f64,
}

impl<T: Real> PointCloudFrame<T> {
    pub fn new(points: Vec<Point<T>>, frame_index: u64, sensor_name: &str, timestamp: f64) -> Self {
        PointCloudFrame {
            points,
            frame_index,
            sensor_name: sensor_name.to_owned(),
            timestamp,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3<T>> + '_ {
        self.points.iter().map(|p| p.position)
    }

    pub fn cast<U: Real>(&self) -> PointCloudFrame<U> {
        PointCloudFrame {
            points: self
                .points
                .iter()
                .map(|p| Point {
                    position: p.position.cast(),
                    intensity: U::lit(p.intensity.as_f64()),
                })
                .collect(),
            frame_index: self.frame_index,
            sensor_name: self.sensor_name.clone(),
            timestamp: self.timestamp,
        }
    }
}

/// Returns of one revolution. Each channel draws from its own random stream
/// keyed by `(rng_seed, frame_index, channel)`, so channels are simulated in
/// parallel without affecting the output.
pub fn simulate_scan<T: Real, S: RayCast<T> + Sync>(
    scene: &S,
    spec: &SensorSpec,
    pose: &SensorPose,
    frame_index: u64,
    rng_seed: u64,
) -> Result<PointCloudFrame<T>> {
    pose.validate()?;
    let pattern = derive_scan_pattern(spec)?;
    let noise = Normal::new(0.0, spec.noise_stddev_m)
        .map_err(|e| Error::validation("noise_stddev_m", e.to_string()))?;
    let rotation: Mat3<T> = {
        let r = pose.rotation();
        Mat3 {
            rows: [r.rows[0].cast(), r.rows[1].cast(), r.rows[2].cast()],
        }
    };
    let origin: Vec3<T> = pose.center().cast();
    let max_range = T::lit(spec.max_range_m);
    let one = T::one();

    // Azimuth direction table shared by all channels.
    let azimuths: Vec<(f64, f64)> = (0..pattern.steps_per_rev)
        .map(|k| pattern.azimuth(k).to_radians().sin_cos())
        .collect();

    let per_channel: Vec<Vec<Point<T>>> = pattern
        .elevation_angles
        .par_iter()
        .enumerate()
        .map(|(channel, &elevation)| {
            let mut rng = rng::stream(rng_seed, &[frame_index, channel as u64]);
            let (sin_e, cos_e) = elevation.to_radians().sin_cos();
            let mut out = Vec::new();
            for &(sin_a, cos_a) in &azimuths {
                let local = Vec3::new(cos_e * cos_a, cos_e * sin_a, sin_e).cast::<T>();
                let ray = Ray {
                    origin,
                    direction: rotation.mul_vec(local),
                };
                let Some(hit) = scene.intersect(&ray, max_range) else {
                    continue;
                };
                let mut range = hit.distance;
                if spec.noise_stddev_m > 0.0 {
                    range = range + T::lit(noise.sample(&mut rng));
                    if range > max_range || range <= T::zero() {
                        continue;
                    }
                }
                if spec.dropout_prob > 0.0 && rng.random::<f64>() < spec.dropout_prob {
                    continue;
                }
                let p = local * range;
                out.push(Point::new(p.x, p.y, p.z, one));
            }
            out
        })
        .collect();

    let points = per_channel.into_iter().flatten().collect();
    Ok(PointCloudFrame::new(
        points,
        frame_index,
        &spec.name,
        frame_index as f64 / spec.rotation_hz,
    ))
}

/// Concatenates frames after moving each into the world frame via its pose.
pub fn merge_frames<T: Real>(
    frames: &[PointCloudFrame<T>],
    poses: &[SensorPose],
) -> Result<PointCloudFrame<T>> {
    if frames.is_empty() || frames.len() != poses.len() {
        return Err(Error::validation(
            "frames",
            format!("{} frames vs {} poses", frames.len(), poses.len()),
        ));
    }
    let mut points = Vec::with_capacity(frames.iter().map(|f| f.len()).sum());
    for (frame, pose) in frames.iter().zip(poses) {
        points.extend(frame.points.iter().map(|p| Point {
            position: pose.to_world(p.position.cast()).cast(),
            intensity: p.intensity,
        }));
    }
    Ok(PointCloudFrame::new(
        points,
        frames[0].frame_index,
        "merged",
        frames[0].timestamp,
    ))
}
