use super::Vec3;
use crate::Real;

/// Hits closer than this to the ray origin are treated as self-intersections.
pub const MIN_HIT_DISTANCE: f64 = 1e-6;
/// Determinant threshold below which a ray counts as parallel to a triangle.
pub const DETERMINANT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray<T> {
    pub origin: Vec3<T>,
    /// Unit length.
    pub direction: Vec3<T>,
}

impl<T: Real> Ray<T> {
    /// Builds a ray, normalizing `direction`.
    pub fn new(origin: Vec3<T>, direction: Vec3<T>) -> Self {
        Ray {
            origin,
            direction: direction.normalized(),
        }
    }

    #[inline]
    pub fn at(&self, t: T) -> Vec3<T> {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit<T> {
    pub distance: T,
    pub point: Vec3<T>,
    pub object_id: u32,
    /// Index of the hit triangle in the concatenated input order.
    pub triangle: u32,
}

/// Möller–Trumbore ray/triangle test. Returns the ray parameter of the hit.
///
/// Barycentric bounds are widened by a few ulps so that rays through a shared
/// edge cannot slip between two adjacent triangles.
#[inline]
pub fn intersect_triangle<T: Real>(ray: &Ray<T>, v0: Vec3<T>, v1: Vec3<T>, v2: Vec3<T>) -> Option<T> {
    let e1 = v1 - v0;
    let e2 = v2 - v0;
    let p = ray.direction.cross(e2);
    let det = e1.dot(p);
    if det.abs() < T::lit(DETERMINANT_EPSILON) {
        return None;
    }
    let inv = T::one() / det;
    let s = ray.origin - v0;
    let u = s.dot(p) * inv;
    let slack = T::epsilon() * T::lit(64.0);
    if u < -slack || u > T::one() + slack {
        return None;
    }
    let q = s.cross(e1);
    let v = ray.direction.dot(q) * inv;
    if v < -slack || u + v > T::one() + slack {
        return None;
    }
    Some(e2.dot(q) * inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> [Vec3<f64>; 3] {
        [
            Vec3::new(-1.0, -1.0, 5.0),
            Vec3::new(1.0, -1.0, 5.0),
            Vec3::new(0.0, 1.0, 5.0),
        ]
    }

    #[test]
    fn hits_in_front() {
        let r = Ray::new(Vec3::zero(), Vec3::new(0.0, 0.0, 1.0));
        let [a, b, c] = tri();
        assert_eq!(intersect_triangle(&r, a, b, c), Some(5.0));
    }

    #[test]
    fn reports_negative_parameter_behind() {
        let r = Ray::new(Vec3::zero(), Vec3::new(0.0, 0.0, -1.0));
        let [a, b, c] = tri();
        assert_eq!(intersect_triangle(&r, a, b, c), Some(-5.0));
    }

    #[test]
    fn parallel_ray_misses() {
        let r = Ray::new(Vec3::new(0.0, 0.0, 5.0), Vec3::new(1.0, 0.0, 0.0));
        let [a, b, c] = tri();
        assert_eq!(intersect_triangle(&r, a, b, c), None);
    }

    #[test]
    fn outside_misses() {
        let r = Ray::new(Vec3::new(3.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0));
        let [a, b, c] = tri();
        assert_eq!(intersect_triangle(&r, a, b, c), None);
    }
}
