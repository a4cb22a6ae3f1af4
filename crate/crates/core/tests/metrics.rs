//! Metric kernels against brute-force and closed-form oracles.

use dt_lidar_core::metrics::{chamfer, emd, emd_detailed, frechet, mmd_rbf, Bandwidth, EmdMode};
use dt_lidar_core::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn uniform_set(n: usize, dim: usize, seed: u64, offset: f64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * dim).map(|_| rng.random_range(-1.0..1.0) + offset).collect();
    PointSet::new(dim, data).unwrap()
}

fn gaussian_set(n: usize, mean: [f64; 3], std: [f64; 3], seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(3 * n);
    for _ in 0..n {
        for k in 0..3 {
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(mean[k] + std[k] * z);
        }
    }
    PointSet::new(3, data).unwrap()
}

fn d(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn exhaustive_chamfer(a: &PointSet, b: &PointSet) -> f64 {
    let one_way = |x: &PointSet, y: &PointSet| {
        x.iter()
            .map(|p| y.iter().map(|q| d(p, q)).fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            / x.len() as f64
    };
    one_way(a, b) + one_way(b, a)
}

fn naive_mmd(a: &PointSet, b: &PointSet, sigma: f64) -> f64 {
    let k = |p: &[f64], q: &[f64]| (-d(p, q).powi(2) / (2.0 * sigma * sigma)).exp();
    let mean = |x: &PointSet, y: &PointSet| {
        let mut s = 0.0;
        for p in x.iter() {
            for q in y.iter() {
                s += k(p, q);
            }
        }
        s / (x.len() * y.len()) as f64
    };
    mean(a, a) + mean(b, b) - 2.0 * mean(a, b)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn enumerated_emd(a: &PointSet, b: &PointSet) -> f64 {
    permutations(a.len())
        .iter()
        .map(|perm| perm.iter().enumerate().map(|(i, &j)| d(a.point(i), b.point(j))).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
        / a.len() as f64
}

#[test]
fn chamfer_matches_exhaustive_search() {
    for seed in 0..20 {
        for dim in [2, 3, 8] {
            let a = uniform_set(50, dim, seed, 0.0);
            let b = uniform_set(50 - (seed as usize % 7), dim, seed + 100, 0.3);
            let got = chamfer(&a, &b).unwrap();
            assert!((got - exhaustive_chamfer(&a, &b)).abs() <= 1e-9);
        }
    }
}

#[test]
fn chamfer_matches_exhaustive_search_with_duplicates() {
    let base = uniform_set(25, 3, 1, 0.0);
    let a = base.concat(&base).unwrap();
    let b = uniform_set(40, 3, 2, 0.0);
    assert!((chamfer(&a, &b).unwrap() - exhaustive_chamfer(&a, &b)).abs() <= 1e-9);
}

#[test]
fn mmd_matches_naive_double_sum() {
    for seed in 0..20 {
        let a = uniform_set(20, 3, seed, 0.0);
        let b = uniform_set(20, 3, seed + 50, 0.2);
        for sigma in [0.1, 0.5, 1.0, 3.0] {
            let got = mmd_rbf(&a, &b, Bandwidth::Fixed(sigma)).unwrap();
            assert!((got - naive_mmd(&a, &b, sigma)).abs() <= 1e-12, "sigma {sigma}");
        }
    }
}

#[test]
fn mmd_auto_bandwidth_is_pooled_median() {
    let a = uniform_set(20, 3, 1, 0.0);
    let b = uniform_set(21, 3, 2, 0.5);
    let pooled = a.concat(&b).unwrap();
    let mut dists = Vec::new();
    for i in 0..pooled.len() {
        for j in i + 1..pooled.len() {
            dists.push(d(pooled.point(i), pooled.point(j)));
        }
    }
    dists.sort_by(f64::total_cmp);
    let m = dists.len();
    let median = if m % 2 == 1 { dists[m / 2] } else { (dists[m / 2 - 1] + dists[m / 2]) / 2.0 };
    let got = mmd_rbf(&a, &b, Bandwidth::Auto).unwrap();
    assert!((got - naive_mmd(&a, &b, median)).abs() <= 1e-12);
}

#[test]
fn exact_emd_matches_permutation_enumeration() {
    for n in 1..=7 {
        for seed in 0..6 {
            let a = uniform_set(n, 3, seed, 0.0);
            let b = uniform_set(n, 3, seed + 1000, 0.4);
            let got = emd(&a, &b, EmdMode::Exact).unwrap();
            assert!((got - enumerated_emd(&a, &b)).abs() <= 1e-9, "n={n} seed={seed}");
        }
    }
}

#[test]
fn approximate_emd_is_close_to_exact() {
    let a = uniform_set(200, 3, 1, 0.0);
    let b = uniform_set(200, 3, 2, 1.5);
    let exact = emd(&a, &b, EmdMode::Exact).unwrap();
    let approx = emd_detailed(&a, &b, EmdMode::Approx).unwrap();
    assert!(approx.converged);
    // Entropic smoothing can only add cost to the optimal plan.
    assert!(approx.value >= exact - 1e-9);
    assert!((approx.value - exact) / exact < 0.05, "approx {} exact {exact}", approx.value);
}

#[test]
fn frechet_shift_matches_closed_form() {
    let a = gaussian_set(10_000, [0.0; 3], [1.0; 3], 1);
    let b = gaussian_set(10_000, [3.0, 0.0, 0.0], [1.0; 3], 2);
    let fd = frechet(&a, &b).unwrap();
    assert!((fd - 9.0).abs() / 9.0 < 0.10, "fd {fd}");
}

#[test]
fn frechet_commuting_covariances_match_closed_form() {
    // Σx = I, Σy = diag(4, 1, 1): tr(Σx + Σy - 2 (ΣxΣy)^½) = 3 + 6 - 2·4 = 1.
    let a = gaussian_set(10_000, [0.0; 3], [1.0; 3], 3);
    let b = gaussian_set(10_000, [0.0; 3], [2.0, 1.0, 1.0], 4);
    let fd = frechet(&a, &b).unwrap();
    assert!((fd - 1.0).abs() < 0.10, "fd {fd}");
}

#[test]
fn frechet_non_commuting_covariances() {
    // Σy is Σx rotated by 45° about z; both have equal means.
    // Closed form for 2x2 blocks diag(4,1) and its 45° rotation.
    let a = gaussian_set(20_000, [0.0; 3], [2.0, 1.0, 1.0], 5);
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let b = gaussian_set(20_000, [0.0; 3], [2.0, 1.0, 1.0], 6)
        .map(|p| vec![c * p[0] - c * p[1], c * p[0] + c * p[1], p[2]])
        .unwrap();
    // Σx = diag(4,1), Σy = [[2.5,1.5],[1.5,2.5]]; sqrt(Σx^½ Σy Σx^½) computed by hand:
    // M = [[10,3],[3,2.5]], eigenvalues (12.5 ± sqrt(56.25+36))/2.
    let disc = (7.5f64 * 7.5 + 36.0).sqrt();
    let tr_sqrt = ((12.5 + disc) / 2.0).sqrt() + ((12.5 - disc) / 2.0).sqrt();
    let expected = 5.0 + 5.0 - 2.0 * tr_sqrt;
    let fd = frechet(&a, &b).unwrap();
    assert!((fd - expected).abs() < 0.05 * expected.max(0.5), "fd {fd} expected {expected}");
}

#[test]
fn self_distance_is_zero() {
    let a = uniform_set(300, 3, 8, 0.0);
    assert_eq!(chamfer(&a, &a).unwrap(), 0.0);
    assert!(mmd_rbf(&a, &a, Bandwidth::Auto).unwrap() <= 1e-12);
    assert_eq!(emd(&a, &a, EmdMode::Exact).unwrap(), 0.0);
    assert!(frechet(&a, &a).unwrap().abs() <= 1e-6);
}

#[test]
fn metrics_are_symmetric() {
    let a = uniform_set(60, 3, 1, 0.0);
    let b = uniform_set(60, 3, 2, 0.7);
    assert!((chamfer(&a, &b).unwrap() - chamfer(&b, &a).unwrap()).abs() < 1e-12);
    assert!((mmd_rbf(&a, &b, Bandwidth::Auto).unwrap() - mmd_rbf(&b, &a, Bandwidth::Auto).unwrap()).abs() < 1e-12);
    assert!((emd(&a, &b, EmdMode::Exact).unwrap() - emd(&b, &a, EmdMode::Exact).unwrap()).abs() < 1e-12);
    assert!((frechet(&a, &b).unwrap() - frechet(&b, &a).unwrap()).abs() < 1e-9);
}

#[test]
fn rigid_motion_preserves_distances_and_scaling_scales_them() {
    let a = uniform_set(80, 3, 11, 0.0);
    let b = uniform_set(80, 3, 12, 0.5);
    let (s, c) = 0.7f64.sin_cos();
    let rigid = |p: &[f64]| vec![c * p[0] - s * p[1] + 4.0, s * p[0] + c * p[1] - 2.0, p[2] + 1.0];
    let (ra, rb) = (a.map(rigid).unwrap(), b.map(rigid).unwrap());
    let scale = |p: &[f64]| p.iter().map(|x| 3.0 * x).collect();
    let (sa, sb) = (a.map(scale).unwrap(), b.map(scale).unwrap());

    let cd = chamfer(&a, &b).unwrap();
    assert!((chamfer(&ra, &rb).unwrap() - cd).abs() < 1e-9);
    assert!((chamfer(&sa, &sb).unwrap() - 3.0 * cd).abs() < 1e-9);

    let e = emd(&a, &b, EmdMode::Exact).unwrap();
    assert!((emd(&ra, &rb, EmdMode::Exact).unwrap() - e).abs() < 1e-9);
    assert!((emd(&sa, &sb, EmdMode::Exact).unwrap() - 3.0 * e).abs() < 1e-9);

    // Auto bandwidth scales along, so MMD is scale invariant.
    let m = mmd_rbf(&a, &b, Bandwidth::Auto).unwrap();
    assert!((mmd_rbf(&ra, &rb, Bandwidth::Auto).unwrap() - m).abs() < 1e-12);
    assert!((mmd_rbf(&sa, &sb, Bandwidth::Auto).unwrap() - m).abs() < 1e-12);

    let f = frechet(&a, &b).unwrap();
    assert!((frechet(&ra, &rb).unwrap() - f).abs() < 1e-6);
    assert!((frechet(&sa, &sb).unwrap() - 9.0 * f).abs() < 1e-4);
}

#[test]
fn larger_shift_means_larger_gap() {
    let a = uniform_set(150, 3, 1, 0.0);
    let near = uniform_set(150, 3, 2, 0.2);
    let far = uniform_set(150, 3, 3, 1.0);
    assert!(chamfer(&a, &near).unwrap() < chamfer(&a, &far).unwrap());
    assert!(mmd_rbf(&a, &near, Bandwidth::Fixed(1.0)).unwrap() < mmd_rbf(&a, &far, Bandwidth::Fixed(1.0)).unwrap());
    assert!(emd(&a, &near, EmdMode::Exact).unwrap() < emd(&a, &far, EmdMode::Exact).unwrap());
    assert!(frechet(&a, &near).unwrap() < frechet(&a, &far).unwrap());
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let a = uniform_set(5, 3, 1, 0.0);
    let b = uniform_set(5, 2, 2, 0.0);
    assert!(chamfer(&a, &b).is_err());
    assert!(mmd_rbf(&a, &b, Bandwidth::Auto).is_err());
    assert!(emd(&a, &b, EmdMode::Exact).is_err());
    assert!(frechet(&a, &b).is_err());
}
