//! Oriented box tests: 2D footprint overlap and 3D point containment.

use crate::geometry::Vec3;

/// Yaw-oriented box: center, full extents `(length, width, height)`, heading about +z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: Vec3<f64>,
    pub dims: [f64; 3],
    pub heading: f64,
}

impl OrientedBox {
    /// Point coordinates in the box's own axes.
    pub fn to_local(&self, p: Vec3<f64>) -> Vec3<f64> {
        let (s, c) = self.heading.sin_cos();
        let d = p - self.center;
        Vec3::new(c * d.x + s * d.y, -s * d.x + c * d.y, d.z)
    }

    /// Containment with every face pushed outward by `margin`.
    pub fn contains(&self, p: Vec3<f64>, margin: f64) -> bool {
        let l = self.to_local(p);
        l.x.abs() <= 0.5 * self.dims[0] + margin
            && l.y.abs() <= 0.5 * self.dims[1] + margin
            && l.z.abs() <= 0.5 * self.dims[2] + margin
    }

    /// Footprint corners in the xy plane, counter-clockwise.
    pub fn footprint(&self) -> [[f64; 2]; 4] {
        let (s, c) = self.heading.sin_cos();
        let (hl, hw) = (0.5 * self.dims[0], 0.5 * self.dims[1]);
        [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)].map(|(u, v)| {
            [
                self.center.x + c * u - s * v,
                self.center.y + s * u + c * v,
            ]
        })
    }

    pub fn footprint_radius(&self) -> f64 {
        0.5 * self.dims[0].hypot(self.dims[1])
    }

    /// Separating-axis test on the xy footprints. Touching boxes do not overlap.
    pub fn footprints_overlap(&self, other: &OrientedBox) -> bool {
        let a = self.footprint();
        let b = other.footprint();
        let axes = [self.heading, self.heading + std::f64::consts::FRAC_PI_2]
            .into_iter()
            .chain([other.heading, other.heading + std::f64::consts::FRAC_PI_2]);
        for angle in axes {
            let (s, c) = angle.sin_cos();
            let project = |corners: &[[f64; 2]; 4]| {
                corners.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    let d = p[0] * c + p[1] * s;
                    (lo.min(d), hi.max(d))
                })
            };
            let (a_lo, a_hi) = project(&a);
            let (b_lo, b_hi) = project(&b);
            if a_hi <= b_lo || b_hi <= a_lo {
                return false;
            }
        }
        true
    }
}
