use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::pointset::{same_dim, PointSet};
use crate::{Error, Real, Result};

/// Ridge added to each covariance, relative to its mean diagonal.
pub const COVARIANCE_RIDGE: f64 = 1e-6;

/// Sample mean and unbiased covariance (plus ridge), accumulated in `f64`.
fn moments<T: Real>(x: &PointSet<T>) -> (DVector<f64>, DMatrix<f64>) {
    let (n, d) = (x.len(), x.dim());
    let data = DMatrix::from_row_iterator(n, d, x.as_slice().iter().map(|v| v.as_f64()));
    let mean = data.row_mean().transpose();
    let mut centered = data;
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let mut cov = centered.transpose() * &centered / (n as f64 - 1.0);
    let ridge = COVARIANCE_RIDGE * cov.diagonal().mean();
    for i in 0..d {
        cov[(i, i)] += ridge;
    }
    (mean, cov)
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Principal square root of a symmetric PSD matrix; negative eigenvalues clamp to 0.
fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// `trace((A B)^{1/2})`, via the symmetric similar matrix `A^{1/2} B A^{1/2}`.
fn trace_sqrt_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let ra = psd_sqrt(a);
    let inner = symmetrize(&(&ra * b * &ra));
    SymmetricEigen::new(inner)
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum()
}

/// Fréchet distance between Gaussian fits of the two samples:
/// `|mu_x - mu_y|^2 + tr(S_x + S_y - 2 (S_x S_y)^{1/2})`.
pub fn frechet<T: Real>(x: &PointSet<T>, y: &PointSet<T>) -> Result<T> {
    same_dim(x, y)?;
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::Metric(format!(
            "Fréchet distance needs at least 2 samples per side ({} and {} given)",
            x.len(),
            y.len()
        )));
    }
    let (mx, sx) = moments(x);
    let (my, sy) = moments(y);
    let mean_term = (&mx - &my).norm_squared();
    let trace_term = sx.trace() + sy.trace() - 2.0 * trace_sqrt_product(&sx, &sy);
    Ok(T::lit((mean_term + trace_term).max(0.0)))
}
