use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ActorInstance;
use crate::geometry::Vec3;
use crate::sensor::{PointCloudFrame, SensorPose};
use crate::Real;

/// Faces are pushed out by this much when counting points inside an actor box.
pub const LABEL_BOX_MARGIN: f64 = 1e-6;

/// Ground-truth 3D box in the frame of the point cloud it labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxLabel {
    pub center: Vec3<f64>,
    /// (dx, dy, dz): extents along the box's heading, lateral and vertical axes.
    pub dims: [f64; 3],
    pub heading: f64,
    pub class_name: String,
    pub num_points: u32,
}

impl BoxLabel {
    pub fn volume(&self) -> f64 {
        self.dims.iter().product()
    }
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    // Leave in-range angles untouched; the shift below is not exact.
    if a > -PI && a <= PI {
        return a;
    }
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI { PI } else { w }
}

/// Emits a label for each actor covering at least `min_points` frame points.
///
/// Points are moved to the world frame through `pose`; emitted boxes are
/// expressed back in the sensor frame with the heading reduced by the
/// sensor's yaw. Pass the identity pose for world-frame (merged) clouds.
pub fn generate_labels<T: Real>(
    frame: &PointCloudFrame<T>,
    pose: &SensorPose,
    actors: &[ActorInstance],
    min_points: u32,
) -> Vec<BoxLabel> {
    let world: Vec<Vec3<f64>> = frame
        .positions()
        .map(|p| pose.to_world(p.cast()))
        .collect();
    let yaw = pose.yaw_deg.to_radians();
    actors
        .iter()
        .filter_map(|actor| {
            let b = actor.oriented_box();
            let reach = 0.5 * b.dims.iter().map(|d| d * d).sum::<f64>().sqrt() + LABEL_BOX_MARGIN;
            let count = world
                .iter()
                .filter(|&&p| (p - b.center).norm_squared() <= reach * reach)
                .filter(|&&p| b.contains(p, LABEL_BOX_MARGIN))
                .count() as u32;
            (count >= min_points).then(|| BoxLabel {
                center: pose.to_sensor(actor.center),
                dims: actor.dims,
                heading: wrap_angle(actor.heading - yaw),
                class_name: actor.class_name.clone(),
                num_points: count,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::Point;

    fn actor(center: Vec3<f64>, heading: f64) -> ActorInstance {
        ActorInstance {
            class_name: "car".into(),
            center,
            dims: [4.0, 2.0, 1.5],
            heading,
            speed: 0.0,
            lane_index: 0,
            arc_position: 0.0,
        }
    }

    fn frame(points: &[Vec3<f64>]) -> PointCloudFrame<f64> {
        PointCloudFrame::new(
            points.iter().map(|p| Point::new(p.x, p.y, p.z, 1.0)).collect(),
            0,
            "s",
            0.0,
        )
    }

    #[test]
    fn occluded_actor_unlabeled() {
        let a = actor(Vec3::new(10.0, 0.0, 0.75), 0.0);
        let labels = generate_labels(&frame(&[]), &SensorPose::default(), &[a], 1);
        assert!(labels.is_empty());
    }

    #[test]
    fn single_center_point() {
        let c = Vec3::new(10.0, 5.0, 0.75);
        let labels = generate_labels(&frame(&[c]), &SensorPose::default(), &[actor(c, 0.3)], 1);
        assert_eq!(labels.len(), 1);
        assert_eq!(labels[0].num_points, 1);
        assert_eq!(labels[0].heading, 0.3);
    }

    #[test]
    fn label_expressed_in_sensor_frame() {
        let pose = SensorPose::at(Vec3::new(0.0, 0.0, 5.0)).with_tilt(90.0, 0.0, 0.0);
        let a = actor(Vec3::new(0.0, 10.0, 0.75), std::f64::consts::FRAC_PI_2);
        // World point at the actor center, as seen by the sensor.
        let local = pose.to_sensor(a.center);
        let labels = generate_labels(&frame(&[local]), &pose, &[a], 1);
        assert_eq!(labels.len(), 1);
        let l = &labels[0];
        assert!((l.center - Vec3::new(10.0, 0.0, -4.25)).norm() < 1e-12);
        assert!(l.heading.abs() < 1e-12);
    }

    #[test]
    fn min_points_threshold() {
        let c = Vec3::new(0.0, 0.0, 0.0);
        let pts = [c, c + Vec3::new(0.1, 0.0, 0.0), Vec3::new(50.0, 0.0, 0.0)];
        let a = actor(c, 0.0);
        assert_eq!(generate_labels(&frame(&pts), &SensorPose::default(), std::slice::from_ref(&a), 2)[0].num_points, 2);
        assert!(generate_labels(&frame(&pts), &SensorPose::default(), &[a], 3).is_empty());
    }

    #[test]
    fn wrap() {
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(0.5), 0.5);
    }
}
