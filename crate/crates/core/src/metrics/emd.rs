//! Earth Mover's Distance between uniform empirical distributions.
//!
//! `Exact` solves the optimal assignment between equal-size sets with the
//! Hungarian algorithm (O(n^3)). `Approx` runs log-domain Sinkhorn iterations
//! for entropic optimal transport and reports the transport cost of the
//! resulting plan, which upper-bounds the exact value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pointset::{dist, median_pairwise_distance, same_dim, PointSet};
use crate::{Error, Real, Result};

/// Largest set size accepted by exact mode.
pub const EXACT_EMD_MAX_POINTS: usize = 2048;
/// Entropic regularization relative to the median pairwise distance.
pub const SINKHORN_EPSILON_SCALE: f64 = 0.05;
pub const SINKHORN_MAX_ITERATIONS: usize = 1000;
/// L1 violation of the row marginals below which Sinkhorn stops.
pub const SINKHORN_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmdMode {
    Exact,
    Approx,
}

impl std::str::FromStr for EmdMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(EmdMode::Exact),
            "approx" => Ok(EmdMode::Approx),
            _ => Err(format!("emd mode must be \"exact\" or \"approx\", got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmdOutcome<T> {
    pub value: T,
    /// Sinkhorn iterations run (0 in exact mode).
    pub iterations: usize,
    pub converged: bool,
}

fn cost_matrix<T: Real>(x: &PointSet<T>, y: &PointSet<T>) -> Vec<Vec<T>> {
    (0..x.len())
        .into_par_iter()
        .map(|i| y.iter().map(|q| dist(x.point(i), q)).collect())
        .collect()
}

/// Minimum-cost perfect matching on a square matrix. Returns `assignment[row] = col`.
pub fn hungarian<T: Real>(cost: &[Vec<T>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|row| row.len() == n));

    let inf = T::infinity();
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

fn log_sum_exp<T: Real>(values: impl Iterator<Item = T> + Clone) -> T {
    let max = values.clone().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<T>().ln()
}

fn sinkhorn<T: Real>(cost: &[Vec<T>], epsilon: T) -> EmdOutcome<T> {
    let (n, m) = (cost.len(), cost[0].len());
    let log_a = -T::from_usize_lossy(n).ln();
    let log_b = -T::from_usize_lossy(m).ln();
    let a = T::one() / T::from_usize_lossy(n);
    let mut f = vec![T::zero(); n];
    let mut g = vec![T::zero(); m];
    let tol = T::lit(SINKHORN_TOLERANCE);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < SINKHORN_MAX_ITERATIONS {
        iterations += 1;
        f = (0..n)
            .into_par_iter()
            .map(|i| epsilon * (log_a - log_sum_exp((0..m).map(|j| (g[j] - cost[i][j]) / epsilon))))
            .collect();
        g = (0..m)
            .into_par_iter()
            .map(|j| epsilon * (log_b - log_sum_exp((0..n).map(|i| (f[i] - cost[i][j]) / epsilon))))
            .collect();
        // Columns now match exactly; measure how far the rows are off.
        let violation: T = (0..n)
            .into_par_iter()
            .map(|i| {
                let row: T = (0..m).map(|j| ((f[i] + g[j] - cost[i][j]) / epsilon).exp()).sum();
                (row - a).abs()
            })
            .collect::<Vec<T>>()
            .into_iter()
            .sum();
        if violation < tol {
            converged = true;
            break;
        }
    }

    let row_costs: Vec<T> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| ((f[i] + g[j] - cost[i][j]) / epsilon).exp() * cost[i][j])
                .sum()
        })
        .collect();
    EmdOutcome {
        value: row_costs.into_iter().sum(),
        iterations,
        converged,
    }
}

pub fn emd_detailed<T: Real>(x: &PointSet<T>, y: &PointSet<T>, mode: EmdMode) -> Result<EmdOutcome<T>> {
    same_dim(x, y)?;
    match mode {
        EmdMode::Exact => {
            if x.len() != y.len() {
                return Err(Error::Metric(format!(
                    "exact EMD needs equal set sizes ({} vs {}); use approx mode",
                    x.len(),
                    y.len()
                )));
            }
            if x.len() > EXACT_EMD_MAX_POINTS {
                return Err(Error::Metric(format!(
                    "exact EMD is limited to {EXACT_EMD_MAX_POINTS} points per side ({} given); use approx mode",
                    x.len()
                )));
            }
            let cost = cost_matrix(x, y);
            let assignment = hungarian(&cost);
            let total: T = assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            Ok(EmdOutcome {
                value: total / T::from_usize_lossy(x.len()),
                iterations: 0,
                converged: true,
            })
        }
        EmdMode::Approx => {
            let pooled: Vec<&[T]> = x.iter().chain(y.iter()).collect();
            let median = median_pairwise_distance(&pooled);
            if median == T::zero() {
                // All pooled points coincide, so nothing needs to move.
                return Ok(EmdOutcome {
                    value: T::zero(),
                    iterations: 0,
                    converged: true,
                });
            }
            let epsilon = T::lit(SINKHORN_EPSILON_SCALE) * median;
            Ok(sinkhorn(&cost_matrix(x, y), epsilon))
        }
    }
}

pub fn emd<T: Real>(x: &PointSet<T>, y: &PointSet<T>, mode: EmdMode) -> Result<T> {
    emd_detailed(x, y, mode).map(|o| o.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mass() {
        let x = PointSet::<f64>::from_rows(&[[0.0, 0.0, 0.0]]).unwrap();
        let y = PointSet::from_rows(&[[0.0, 3.0, 4.0]]).unwrap();
        assert_eq!(emd(&x, &y, EmdMode::Exact).unwrap(), 5.0);
        let approx = emd(&x, &y, EmdMode::Approx).unwrap();
        assert!((approx - 5.0).abs() < 1e-9, "{approx}");
    }

    #[test]
    fn identical_sets_exact_zero() {
        let x = PointSet::<f64>::from_rows(&[[0.0, 1.0], [5.0, 2.0], [3.0, 3.0]]).unwrap();
        assert_eq!(emd(&x, &x, EmdMode::Exact).unwrap(), 0.0);
    }

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5.0);
    }

    #[test]
    fn exact_rejects_unequal_sizes() {
        let x = PointSet::<f64>::from_rows(&[[0.0], [1.0]]).unwrap();
        let y = PointSet::from_rows(&[[0.0]]).unwrap();
        let err = emd(&x, &y, EmdMode::Exact).unwrap_err().to_string();
        assert!(err.contains("approx"), "{err}");
        assert!(emd(&x, &y, EmdMode::Approx).is_ok());
    }

    #[test]
    fn approx_upper_bounds_exact() {
        let x = PointSet::<f64>::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 1.0]]).unwrap();
        let y = PointSet::from_rows(&[[0.5, 0.1], [1.0, 1.0], [2.0, 2.0], [-1.0, 0.0]]).unwrap();
        let exact = emd(&x, &y, EmdMode::Exact).unwrap();
        let approx = emd_detailed(&x, &y, EmdMode::Approx).unwrap();
        assert!(approx.converged);
        assert!(approx.value >= exact - 1e-6, "{} < {exact}", approx.value);
        assert!(approx.value <= exact * 1.2);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("exact".parse::<EmdMode>(), Ok(EmdMode::Exact));
        assert!("fast".parse::<EmdMode>().is_err());
    }
}
