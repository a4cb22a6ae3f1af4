use rayon::prelude::*;

use super::kdtree::KdTree;
use super::pointset::{same_dim, PointSet};
use crate::{Real, Result};

/// Mean distance from each point of `from` to its nearest neighbour in `to`.
fn directed<T: Real>(from: &PointSet<T>, to: &PointSet<T>) -> T {
    let tree = KdTree::build(to);
    let nearest: Vec<T> = (0..from.len())
        .into_par_iter()
        .map(|i| tree.nearest_sq(from.point(i)).sqrt())
        .collect();
    // Sequential sum keeps the result independent of thread scheduling.
    nearest.iter().copied().sum::<T>() / T::from_usize_lossy(from.len())
}

/// Symmetric, mean-normalized, non-squared Chamfer distance.
pub fn chamfer<T: Real>(a: &PointSet<T>, b: &PointSet<T>) -> Result<T> {
    same_dim(a, b)?;
    Ok(directed(a, b) + directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair() {
        let a = PointSet::<f64>::from_rows(&[[0.0, 0.0, 0.0]]).unwrap();
        let b = PointSet::from_rows(&[[3.0, 4.0, 0.0]]).unwrap();
        assert_eq!(chamfer(&a, &b).unwrap(), 10.0);
    }

    #[test]
    fn identity_is_zero() {
        let a = PointSet::<f64>::from_rows(&[[0.0, 1.0], [2.0, 3.0], [-1.0, 0.5]]).unwrap();
        assert_eq!(chamfer(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let a = PointSet::<f64>::from_rows(&[[0.0, 1.0]]).unwrap();
        let b = PointSet::<f64>::from_rows(&[[0.0, 1.0, 2.0]]).unwrap();
        assert!(chamfer(&a, &b).is_err());
    }
}
