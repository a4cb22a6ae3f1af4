//! Randomized invariants.

use dt_lidar_core::dataset::{decode_points, encode_points, format_labels, parse_labels};
use dt_lidar_core::geometry::{intersect_triangle, Vec3};
use dt_lidar_core::metrics::{chamfer, emd, mmd_rbf, Bandwidth, EmdMode};
use dt_lidar_core::scene::BoxLabel;
use dt_lidar_core::sensor::Point;
use dt_lidar_core::{PointSet, Ray};
use proptest::prelude::*;

fn cloud(max: usize) -> impl Strategy<Value = Vec<[f64; 3]>> {
    prop::collection::vec(prop::array::uniform3(-10.0f64..10.0), 1..max)
}

fn set(rows: &[[f64; 3]]) -> PointSet {
    PointSet::from_rows(rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chamfer_is_nonnegative_and_symmetric(a in cloud(40), b in cloud(40)) {
        let (a, b) = (set(&a), set(&b));
        let ab = chamfer(&a, &b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - chamfer(&b, &a).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn mmd_is_nonnegative(a in cloud(30), b in cloud(30), sigma in 0.1f64..5.0) {
        prop_assert!(mmd_rbf(&set(&a), &set(&b), Bandwidth::Fixed(sigma)).unwrap() >= 0.0);
    }

    #[test]
    fn exact_emd_beats_identity_matching(pairs in prop::collection::vec((prop::array::uniform3(-5.0f64..5.0), prop::array::uniform3(-5.0f64..5.0)), 1..40)) {
        let a: Vec<[f64; 3]> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<[f64; 3]> = pairs.iter().map(|p| p.1).collect();
        let identity = pairs
            .iter()
            .map(|(p, q)| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt())
            .sum::<f64>()
            / pairs.len() as f64;
        let value = emd(&set(&a), &set(&b), EmdMode::Exact).unwrap();
        prop_assert!(value <= identity + 1e-9);
        prop_assert!(value >= 0.0);
    }

    #[test]
    fn points_encoding_round_trips(raw in prop::collection::vec(prop::array::uniform4(-1e4f32..1e4), 0..200)) {
        let points: Vec<Point<f32>> = raw.iter().map(|p| Point::new(p[0], p[1], p[2], p[3])).collect();
        prop_assert_eq!(decode_points(&encode_points(&points)).unwrap(), points);
    }

    #[test]
    fn labels_round_trip(x in -100.0f64..100.0, h in -3.0f64..3.0, n in 0u32..100_000, l in 0.2f64..20.0) {
        let label = BoxLabel {
            center: Vec3::new(x, -x / 3.0, 0.7),
            dims: [l, l / 2.0, 1.5],
            heading: h,
            class_name: "Truck".into(),
            num_points: n,
        };
        let parsed = parse_labels(&format_labels(std::slice::from_ref(&label))).unwrap();
        prop_assert_eq!(parsed, vec![label]);
    }

    #[test]
    fn triangle_hits_lie_on_the_triangle(
        tri in prop::array::uniform3(prop::array::uniform3(-5.0f64..5.0)),
        w in prop::array::uniform3(0.01f64..1.0),
        origin in prop::array::uniform3(-20.0f64..20.0),
    ) {
        let [a, b, c] = tri.map(|p| Vec3::new(p[0], p[1], p[2]));
        prop_assume!((b - a).cross(c - a).norm() > 1e-3);
        let s = w[0] + w[1] + w[2];
        let target = a * (w[0] / s) + b * (w[1] / s) + c * (w[2] / s);
        let o = Vec3::new(origin[0], origin[1], origin[2]);
        prop_assume!((target - o).norm() > 1e-3);
        let ray = Ray::new(o, target - o);
        let t = intersect_triangle(&ray, a, b, c);
        let n = (b - a).cross(c - a).normalized();
        // Grazing rays may legitimately miss.
        prop_assume!(n.dot(ray.direction).abs() > 1e-6);
        let t = t.expect("ray through an interior point hits");
        prop_assert!((t - (target - o).norm()).abs() < 1e-6 * (1.0 + t));
    }
}
