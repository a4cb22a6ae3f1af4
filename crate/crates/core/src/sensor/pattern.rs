use super::SensorSpec;
use crate::Result;

/// Ray directions of one revolution: per-channel elevations times azimuth steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPattern {
    /// Ascending, degrees; first is the lower FOV bound, last the upper.
    pub elevation_angles: Vec<f64>,
    pub azimuth_step: f64,
    pub steps_per_rev: usize,
}

impl ScanPattern {
    pub fn rays_per_rev(&self) -> usize {
        self.elevation_angles.len() * self.steps_per_rev
    }

    pub fn azimuth(&self, step: usize) -> f64 {
        step as f64 * self.azimuth_step
    }
}

/// Firings per channel per revolution, `floor(pps / (hz * channels))`.
pub fn steps_per_revolution(spec: &SensorSpec) -> usize {
    let raw = spec.points_per_second / (spec.rotation_hz * f64::from(spec.channels));
    // Absorb rounding when the quotient is mathematically an integer.
    (raw * (1.0 + 4.0 * f64::EPSILON)).floor() as usize
}

pub fn derive_scan_pattern(spec: &SensorSpec) -> Result<ScanPattern> {
    spec.validate()?;
    let n = spec.channels as usize;
    let elevation_angles = if n == 1 {
        vec![spec.lower_fov_deg]
    } else {
        let span = spec.upper_fov_deg - spec.lower_fov_deg;
        let mut e: Vec<f64> = (0..n)
            .map(|i| spec.lower_fov_deg + span * i as f64 / (n - 1) as f64)
            .collect();
        e[n - 1] = spec.upper_fov_deg;
        e
    };
    let steps_per_rev = steps_per_revolution(spec);
    Ok(ScanPattern {
        elevation_angles,
        azimuth_step: 360.0 / steps_per_rev as f64,
        steps_per_rev,
    })
}
