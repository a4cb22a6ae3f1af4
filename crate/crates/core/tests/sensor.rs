//! Scan-pattern geometry and noise statistics of the simulated sensor.

use dt_lidar_core::geometry::{Bvh, EmptyScene, TriangleMesh, Vec3};
use dt_lidar_core::sensor::{derive_scan_pattern, simulate_scan, steps_per_revolution, SensorPose, SensorSpec};
use dt_lidar_core::{Bvh as Bvh64, Frame};

fn ground(z: f64) -> Bvh64 {
    Bvh::build(&[TriangleMesh::ground_quad(1000.0, z, 0)]).unwrap()
}

/// Closed box around the origin, small enough for every preset range.
fn enclosure() -> Bvh64 {
    Bvh::build(&[TriangleMesh::cuboid(Vec3::splat(-8.0), Vec3::splat(8.0), 0)]).unwrap()
}

fn table_i() -> [(SensorSpec, usize); 4] {
    // (spec, channels × floor(pps / (hz × channels)))
    [
        (SensorSpec::hesai_pandar64(10.0), 64 * 4062),
        (SensorSpec::velodyne_hdl64e(10.0), 64 * 7765),
        (SensorSpec::hesai_pandar_qt(10.0), 64 * 1359),
        (SensorSpec::velodyne_vlp16(10.0), 16 * 4250),
    ]
}

#[test]
fn ground_ring_at_minus_thirty_degrees() {
    let spec = SensorSpec::new("ring", 1, -30.0, -30.0, 36_000.0, 100.0, 10.0).with_noise(0.0, 0.0);
    let pose = SensorPose::at(Vec3::new(0.0, 0.0, 10.0));
    let frame: Frame = simulate_scan(&ground(0.0), &spec, &pose, 0, 1).unwrap();
    assert_eq!(frame.len(), 3600);
    let radius = 10.0 / 30f64.to_radians().tan();
    for p in frame.positions() {
        assert!((p.norm() - 20.0).abs() <= 1e-6);
        assert!((p.x.hypot(p.y) - radius).abs() <= 1e-6);
        assert!((radius - 17.3205).abs() < 1e-4);
        assert!((p.z + 10.0).abs() <= 1e-6);
    }
}

#[test]
fn ground_rings_are_concentric_per_channel() {
    let spec = SensorSpec::new("rings", 8, -5.0, -40.0, 80_000.0, 500.0, 10.0).with_noise(0.0, 0.0);
    let height = 2.0;
    let frame: Frame = simulate_scan(&ground(0.0), &spec, &SensorPose::at(Vec3::new(3.0, -4.0, height)), 0, 0).unwrap();
    let pattern = derive_scan_pattern(&spec).unwrap();
    let expected: Vec<f64> = pattern
        .elevation_angles
        .iter()
        .map(|e| height / (-e).to_radians().tan())
        .collect();
    for p in frame.positions() {
        let r = p.x.hypot(p.y);
        assert!(expected.iter().any(|&e| (r - e).abs() < 1e-6), "radius {r} on no ring");
    }
    assert_eq!(frame.len(), pattern.rays_per_rev());
}

#[test]
fn table_i_rates_in_an_enclosure() {
    let scene = enclosure();
    for (spec, expected) in table_i() {
        let spec = spec.with_noise(0.0, 0.0);
        assert_eq!(derive_scan_pattern(&spec).unwrap().rays_per_rev(), expected, "{}", spec.name);
        let frame: Frame = simulate_scan(&scene, &spec, &SensorPose::default(), 0, 0).unwrap();
        assert_eq!(frame.len(), expected, "{}", spec.name);
    }
}

#[test]
fn steps_per_revolution_is_floor_of_rate() {
    for (spec, _) in table_i() {
        let quotient = spec.points_per_second / (spec.rotation_hz * f64::from(spec.channels));
        assert_eq!(steps_per_revolution(&spec), quotient.floor() as usize);
    }
    // Exact integer quotient stays put.
    let spec = SensorSpec::new("exact", 16, 15.0, -15.0, 576_000.0, 100.0, 10.0);
    assert_eq!(steps_per_revolution(&spec), 3600);
}

#[test]
fn points_stay_inside_the_vertical_field_of_view() {
    let scene = enclosure();
    for (spec, _) in table_i() {
        let spec = spec.with_noise(0.0, 0.0);
        let frame: Frame = simulate_scan(&scene, &spec, &SensorPose::default(), 0, 0).unwrap();
        for p in frame.positions() {
            let e = p.z.atan2(p.x.hypot(p.y)).to_degrees();
            assert!(e >= spec.lower_fov_deg - 1e-9 && e <= spec.upper_fov_deg + 1e-9);
        }
    }
}

#[test]
fn range_noise_statistics() {
    let sigma = 0.05;
    let spec = SensorSpec::hesai_pandar64(10.0);
    let scene = enclosure();
    let clean: Frame = simulate_scan(&scene, &spec.clone().with_noise(0.0, 0.0), &SensorPose::default(), 0, 0).unwrap();
    let noisy: Frame = simulate_scan(&scene, &spec.with_noise(sigma, 0.0), &SensorPose::default(), 0, 42).unwrap();
    assert_eq!(clean.len(), noisy.len());
    let errors: Vec<f64> = clean
        .positions()
        .zip(noisy.positions())
        .map(|(c, n)| n.norm() - c.norm())
        .collect();
    let n = errors.len() as f64;
    assert!(n >= 1e5);
    let mean = errors.iter().sum::<f64>() / n;
    let std = (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert!(mean.abs() <= 3.0 * sigma / n.sqrt(), "mean {mean}");
    assert!((std - sigma).abs() <= 0.02 * sigma, "std {std}");
}

#[test]
fn noise_acts_along_the_ray() {
    let spec = SensorSpec::velodyne_vlp16(10.0);
    let scene = enclosure();
    let clean: Frame = simulate_scan(&scene, &spec.clone().with_noise(0.0, 0.0), &SensorPose::default(), 0, 0).unwrap();
    let noisy: Frame = simulate_scan(&scene, &spec.with_noise(0.1, 0.0), &SensorPose::default(), 0, 3).unwrap();
    for (c, n) in clean.positions().zip(noisy.positions()) {
        let cos = c.dot(n) / (c.norm() * n.norm());
        assert!(cos > 1.0 - 1e-12);
    }
}

#[test]
fn dropout_survival_rate() {
    let p = 0.3;
    let spec = SensorSpec::velodyne_hdl64e(10.0).with_noise(0.0, p);
    let frame: Frame = simulate_scan(&enclosure(), &spec, &SensorPose::default(), 0, 9).unwrap();
    let rays = derive_scan_pattern(&spec).unwrap().rays_per_rev();
    let survival = frame.len() as f64 / rays as f64;
    assert!((survival - (1.0 - p)).abs() <= 0.01, "survival {survival}");
}

#[test]
fn no_geometry_no_returns() {
    let frame: Frame = simulate_scan(&EmptyScene, &SensorSpec::velodyne_vlp16(10.0), &SensorPose::default(), 0, 0).unwrap();
    assert!(frame.is_empty());
}

#[test]
fn seeded_scans_are_reproducible() {
    let spec = SensorSpec::velodyne_vlp16(10.0).with_noise(0.03, 0.1);
    let scene = enclosure();
    let a: Frame = simulate_scan(&scene, &spec, &SensorPose::default(), 4, 77).unwrap();
    let b: Frame = simulate_scan(&scene, &spec, &SensorPose::default(), 4, 77).unwrap();
    let c: Frame = simulate_scan(&scene, &spec, &SensorPose::default(), 5, 77).unwrap();
    assert_eq!(a.points, b.points);
    assert_ne!(a.points, c.points);
}

#[test]
fn tilted_sensor_returns_land_on_the_ground_in_world_frame() {
    let spec = SensorSpec::velodyne_vlp16(10.0).with_noise(0.0, 0.0);
    let pose = SensorPose::at(Vec3::new(5.0, 2.0, 3.0)).with_tilt(40.0, 10.0, -5.0);
    let frame: Frame = simulate_scan(&ground(0.0), &spec, &pose, 0, 0).unwrap();
    assert!(!frame.is_empty());
    for p in frame.positions() {
        assert!(pose.to_world(p).z.abs() < 1e-9);
    }
}
