use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pointset::{median_pairwise_distance, same_dim, sq_dist, PointSet};
use crate::{Error, Real, Result};

/// RBF kernel bandwidth selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    /// Median pairwise distance of the pooled sample.
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for Bandwidth {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(Bandwidth::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(Bandwidth::Fixed(v)),
            _ => Err(format!("bandwidth must be \"auto\" or a positive number, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmdResult<T> {
    /// Biased (V-statistic) estimate of squared MMD, clamped at zero.
    pub value: T,
    /// Bandwidth actually used; zero when the auto heuristic degenerated.
    pub sigma: T,
}

/// Sum of `k(u, v)` over all `u` in `a`, `v` in `b`.
fn kernel_sum<T: Real>(a: &PointSet<T>, b: &PointSet<T>, gamma: T) -> T {
    let rows: Vec<T> = (0..a.len())
        .into_par_iter()
        .map(|i| {
            let p = a.point(i);
            b.iter().map(|q| (-sq_dist(p, q) * gamma).exp()).sum::<T>()
        })
        .collect();
    rows.iter().copied().sum()
}

pub fn resolve_bandwidth<T: Real>(x: &PointSet<T>, y: &PointSet<T>, bandwidth: Bandwidth) -> Result<T> {
    match bandwidth {
        Bandwidth::Fixed(s) if s.is_finite() && s > 0.0 => Ok(T::lit(s)),
        Bandwidth::Fixed(s) => Err(Error::validation("bandwidth", format!("{s} must be > 0"))),
        Bandwidth::Auto => {
            let pooled: Vec<&[T]> = x.iter().chain(y.iter()).collect();
            Ok(median_pairwise_distance(&pooled))
        }
    }
}

/// Squared MMD with kernel `exp(-|u - v|^2 / (2 sigma^2))`.
pub fn mmd_rbf_detailed<T: Real>(x: &PointSet<T>, y: &PointSet<T>, bandwidth: Bandwidth) -> Result<MmdResult<T>> {
    same_dim(x, y)?;
    let sigma = resolve_bandwidth(x, y, bandwidth)?;
    if sigma == T::zero() {
        // Every pooled point coincides: the two samples are identical.
        return Ok(MmdResult { value: T::zero(), sigma });
    }
    let gamma = T::one() / (T::lit(2.0) * sigma * sigma);
    let (n, m) = (T::from_usize_lossy(x.len()), T::from_usize_lossy(y.len()));
    let kxx = kernel_sum(x, x, gamma) / (n * n);
    let kyy = kernel_sum(y, y, gamma) / (m * m);
    let kxy = kernel_sum(x, y, gamma) / (n * m);
    let value = (kxx + kyy - T::lit(2.0) * kxy).max(T::zero());
    Ok(MmdResult { value, sigma })
}

pub fn mmd_rbf<T: Real>(x: &PointSet<T>, y: &PointSet<T>, bandwidth: Bandwidth) -> Result<T> {
    mmd_rbf_detailed(x, y, bandwidth).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_closed_form() {
        let x = PointSet::<f64>::from_rows(&[[0.0]]).unwrap();
        let y = PointSet::from_rows(&[[2.0]]).unwrap();
        let v = mmd_rbf(&x, &y, Bandwidth::Fixed(1.0)).unwrap();
        assert!((v - 1.729_329_433_526_774_6).abs() < 1e-12, "{v}");
    }

    #[test]
    fn identical_sets_zero() {
        let x = PointSet::<f64>::from_rows(&[[0.0, 1.0], [2.0, -1.0], [0.5, 0.5]]).unwrap();
        assert!(mmd_rbf(&x, &x, Bandwidth::Auto).unwrap() <= 1e-12);
    }

    #[test]
    fn degenerate_auto_bandwidth() {
        let x = PointSet::<f64>::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let r = mmd_rbf_detailed(&x, &x, Bandwidth::Auto).unwrap();
        assert_eq!((r.value, r.sigma), (0.0, 0.0));
    }

    #[test]
    fn bandwidth_parsing() {
        assert_eq!("auto".parse::<Bandwidth>(), Ok(Bandwidth::Auto));
        assert_eq!("0.5".parse::<Bandwidth>(), Ok(Bandwidth::Fixed(0.5)));
        assert!("-1".parse::<Bandwidth>().is_err());
        assert!("wide".parse::<Bandwidth>().is_err());
    }
}
