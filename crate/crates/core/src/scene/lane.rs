use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;
use crate::{Error, Result};

/// Drivable lane centerline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanePolyline {
    pub waypoints: Vec<[f64; 3]>,
    #[serde(rename = "width_m")]
    pub width: f64,
}

impl LanePolyline {
    pub fn new(waypoints: Vec<Vec3<f64>>, width: f64) -> Self {
        LanePolyline {
            waypoints: waypoints.into_iter().map(|p| p.to_array()).collect(),
            width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::validation("waypoints", "at least 2 waypoints required"));
        }
        if self.waypoints.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::validation("waypoints", "non-finite coordinate"));
        }
        if let Some(i) = self.waypoints.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::validation(
                "waypoints",
                format!("waypoints {i} and {} coincide", i + 1),
            ));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::validation("width_m", "must be > 0"));
        }
        Ok(())
    }

    fn point(&self, i: usize) -> Vec3<f64> {
        let [x, y, z] = self.waypoints[i];
        Vec3::new(x, y, z)
    }

    pub fn length(&self) -> f64 {
        (1..self.waypoints.len())
            .map(|i| (self.point(i) - self.point(i - 1)).norm())
            .sum()
    }

    /// Position and planar heading at `arc` meters from the first waypoint.
    ///
    /// `arc` is clamped to the lane; exactly at an interior waypoint the
    /// following segment's heading is used.
    pub fn sample(&self, arc: f64) -> (Vec3<f64>, f64) {
        let mut remaining = arc.max(0.0);
        let last = self.waypoints.len() - 1;
        for i in 0..last {
            let (a, b) = (self.point(i), self.point(i + 1));
            let seg = (b - a).norm();
            if remaining < seg || i + 1 == last {
                let t = (remaining / seg).min(1.0);
                let d = b - a;
                return (a + d * t, d.y.atan2(d.x));
            }
            remaining -= seg;
        }
        unreachable!("lane has at least two waypoints")
    }
}
