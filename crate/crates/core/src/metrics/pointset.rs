use crate::dataset::FeatureMatrix;
use crate::geometry::Vec3;
use crate::{Error, Real, Result};

/// Non-empty set of equal-dimension finite vectors, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> PointSet<T> {
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("point set", "dimension must be >= 1"));
        }
        if data.is_empty() {
            return Err(Error::validation("point set", "empty set"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::validation(
                "point set",
                format!("{} values do not split into {dim}-vectors", data.len()),
            ));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(
                "point set",
                format!("non-finite value in point {}", i / dim),
            ));
        }
        Ok(PointSet { dim, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(i) = rows.iter().position(|r| r.as_ref().len() != dim) {
            return Err(Error::validation(
                "point set",
                format!("row {i} has {} values, expected {dim}", rows[i].as_ref().len()),
            ));
        }
        PointSet::new(dim, rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect())
    }

    pub fn from_vec3s(points: impl IntoIterator<Item = Vec3<T>>) -> Result<Self> {
        PointSet::new(3, points.into_iter().flat_map(|p| p.to_array()).collect())
    }

    pub fn from_features(m: &FeatureMatrix) -> Result<Self> {
        PointSet::new(m.cols, m.values.iter().map(|&v| T::lit(f64::from(v))).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Subset in the order given by `indices`.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        PointSet::new(
            self.dim,
            indices.iter().flat_map(|&i| self.point(i).iter().copied()).collect(),
        )
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        same_dim(self, other)?;
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(PointSet { dim: self.dim, data })
    }

    /// Applies `f` to every coordinate vector.
    pub fn map(&self, f: impl Fn(&[T]) -> Vec<T>) -> Result<Self> {
        let data: Vec<T> = self.iter().flat_map(f).collect();
        PointSet::new(self.dim, data)
    }

    pub fn cast<U: Real>(&self) -> PointSet<U> {
        PointSet {
            dim: self.dim,
            data: self.data.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

pub(crate) fn same_dim<T: Real>(a: &PointSet<T>, b: &PointSet<T>) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a.dim(), b.dim()))
    }
}

#[inline]
pub(crate) fn sq_dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

#[inline]
pub(crate) fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    sq_dist(a, b).sqrt()
}

/// Median Euclidean distance over all unordered pairs of `points`.
/// Returns zero when fewer than two points are given.
pub fn median_pairwise_distance<T: Real>(points: &[&[T]]) -> T {
    let n = points.len();
    if n < 2 {
        return T::zero();
    }
    let mut d: Vec<T> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d.push(dist(points[i], points[j]));
        }
    }
    let cmp = |a: &T, b: &T| a.partial_cmp(b).expect("finite distances");
    let mid = d.len() / 2;
    let (_, &mut upper, _) = d.select_nth_unstable_by(mid, cmp);
    if d.len() % 2 == 1 {
        upper
    } else {
        let lower = d[..mid].iter().copied().fold(T::neg_infinity(), T::max);
        (lower + upper) / T::lit(2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_checks() {
        assert!(PointSet::<f64>::new(3, vec![]).is_err());
        assert!(PointSet::<f64>::new(3, vec![1.0, 2.0]).is_err());
        assert!(PointSet::<f64>::new(1, vec![f64::INFINITY]).is_err());
        assert!(PointSet::<f64>::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        let p = PointSet::<f64>::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!((p.len(), p.dim()), (2, 2));
        assert_eq!(p.point(1), &[3.0, 4.0]);
    }

    #[test]
    fn median_even_and_odd() {
        let pts: Vec<[f64; 1]> = vec![[0.0], [1.0], [3.0]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| &p[..]).collect();
        // Distances 1, 3, 2.
        assert_eq!(median_pairwise_distance(&refs), 2.0);
        let pts: Vec<[f64; 1]> = vec![[0.0], [1.0], [3.0], [7.0]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| &p[..]).collect();
        // Distances 1, 3, 7, 2, 6, 4 -> sorted 1 2 3 4 6 7.
        assert_eq!(median_pairwise_distance(&refs), 3.5);
    }
}
