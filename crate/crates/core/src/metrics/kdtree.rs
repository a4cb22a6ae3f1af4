//! Exact nearest-neighbour search over a [`PointSet`] of any dimension.
//!
//! The tree is implicit: `order[lo..hi]` is split at its midpoint, whose
//! point acts as the pivot along `axis[mid]` (the axis of widest spread).

use super::pointset::{sq_dist, PointSet};
use crate::Real;

const LEAF: usize = 8;

pub struct KdTree<'a, T> {
    points: &'a PointSet<T>,
    order: Vec<usize>,
    axis: Vec<usize>,
}

impl<'a, T: Real> KdTree<'a, T> {
    pub fn build(points: &'a PointSet<T>) -> Self {
        let n = points.len();
        let mut tree = KdTree {
            points,
            order: (0..n).collect(),
            axis: vec![0; n],
        };
        tree.split(0, n);
        tree
    }

    fn split(&mut self, lo: usize, hi: usize) {
        if hi - lo <= LEAF {
            return;
        }
        let dim = self.points.dim();
        let mut best = (0, T::neg_infinity());
        for k in 0..dim {
            let (mn, mx) = self.order[lo..hi].iter().fold((T::infinity(), T::neg_infinity()), |(a, b), &i| {
                let v = self.points.point(i)[k];
                (a.min(v), b.max(v))
            });
            if mx - mn > best.1 {
                best = (k, mx - mn);
            }
        }
        let axis = best.0;
        let mid = (lo + hi) / 2;
        let pts = self.points;
        self.order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            pts.point(a)[axis]
                .partial_cmp(&pts.point(b)[axis])
                .expect("finite coordinates")
        });
        self.axis[mid] = axis;
        self.split(lo, mid);
        self.split(mid + 1, hi);
    }

    /// Squared distance from `query` to its nearest point in the set.
    pub fn nearest_sq(&self, query: &[T]) -> T {
        let mut best = T::infinity();
        self.search(query, 0, self.order.len(), &mut best);
        best
    }

    fn search(&self, q: &[T], lo: usize, hi: usize, best: &mut T) {
        if hi - lo <= LEAF {
            for &i in &self.order[lo..hi] {
                let d = sq_dist(q, self.points.point(i));
                if d < *best {
                    *best = d;
                }
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let pivot = self.points.point(self.order[mid]);
        let d = sq_dist(q, pivot);
        if d < *best {
            *best = d;
        }
        let diff = q[self.axis[mid]] - pivot[self.axis[mid]];
        let (near, far) = if diff < T::zero() {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(q, near.0, near.1, best);
        if diff * diff < *best {
            self.search(q, far.0, far.1, best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_linear_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for dim in [1, 2, 3, 7] {
            let data: Vec<f64> = (0..300 * dim).map(|_| rng.random_range(-5.0..5.0)).collect();
            let set = PointSet::new(dim, data).unwrap();
            let tree = KdTree::build(&set);
            for _ in 0..100 {
                let q: Vec<f64> = (0..dim).map(|_| rng.random_range(-6.0..6.0)).collect();
                let brute = set.iter().map(|p| sq_dist(&q, p)).fold(f64::INFINITY, f64::min);
                assert_eq!(tree.nearest_sq(&q), brute);
            }
        }
    }

    #[test]
    fn duplicates() {
        let set = PointSet::new(2, vec![1.0; 40]).unwrap();
        let tree = KdTree::build(&set);
        assert_eq!(tree.nearest_sq(&[1.0, 1.0]), 0.0);
    }
}
