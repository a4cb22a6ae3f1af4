//! Bounding volume hierarchy over triangle meshes.
//!
//! Nodes are stored flat in depth-first order. Interior nodes split their
//! triangles with a binned surface-area heuristic over triangle centroids,
//! falling back to the centroid median of the longest axis when binning
//! cannot separate them; leaves hold at most [`LEAF_SIZE`] triangles.

use super::ray::{intersect_triangle, MIN_HIT_DISTANCE};
use super::{Hit, Ray, TriangleMesh, Vec3};
use crate::{Error, Real, Result};

const LEAF_SIZE: usize = 4;
const SAH_BINS: usize = 16;
const SAH_MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy)]
struct Triangle<T> {
    v: [Vec3<T>; 3],
    object_id: u32,
    index: u32,
}

#[derive(Debug, Clone, Copy)]
pub struct Aabb<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    fn empty() -> Self {
        Aabb {
            min: Vec3::splat(T::infinity()),
            max: Vec3::splat(T::neg_infinity()),
        }
    }

    fn grow(&mut self, p: Vec3<T>) {
        self.min = self.min.min(p);
        self.max = self.max.max(p);
    }

    fn union(&self, o: &Self) -> Self {
        Aabb {
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }

    fn half_area(&self) -> T {
        let d = self.max - self.min;
        if d.x < T::zero() {
            return T::zero();
        }
        d.x * d.y + d.y * d.z + d.z * d.x
    }

    pub fn contains(&self, p: Vec3<T>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// Widens the box by a few ulps so slab tests stay conservative.
    fn padded(mut self) -> Self {
        let k = T::epsilon() * T::lit(16.0);
        for i in 0..3 {
            let pad = (self.min[i].abs().max(self.max[i].abs()) + T::one()) * k;
            let lo = self.min[i] - pad;
            set(&mut self.min, i, lo);
            let hi = self.max[i] + pad;
            set(&mut self.max, i, hi);
        }
        self
    }

    /// Entry parameter of the ray into the box if it overlaps `[0, t_max]`.
    #[inline]
    fn entry(&self, origin: Vec3<T>, inv_dir: Vec3<T>, t_max: T) -> Option<T> {
        let mut lo = T::zero();
        let mut hi = t_max;
        for i in 0..3 {
            let t0 = (self.min[i] - origin[i]) * inv_dir[i];
            let t1 = (self.max[i] - origin[i]) * inv_dir[i];
            // `min`/`max` drop the NaN produced by 0 * inf.
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
        (lo <= hi).then_some(lo)
    }
}

fn set<T: Copy>(v: &mut Vec3<T>, i: usize, value: T) {
    match i {
        0 => v.x = value,
        1 => v.y = value,
        _ => v.z = value,
    }
}

#[derive(Debug, Clone, Copy)]
struct Node<T> {
    bounds: Aabb<T>,
    /// Leaf: first triangle. Interior: index of the right child (left is `self + 1`).
    offset: u32,
    /// Leaf triangle count; 0 marks an interior node.
    count: u32,
}

/// Immutable ray-acceleration structure over one or more meshes.
#[derive(Debug, Clone)]
pub struct Bvh<T> {
    nodes: Vec<Node<T>>,
    triangles: Vec<Triangle<T>>,
}

/// Anything rays can be cast against.
pub trait RayCast<T> {
    /// Nearest hit with distance in `(MIN_HIT_DISTANCE, max_range]`.
    fn intersect(&self, ray: &Ray<T>, max_range: T) -> Option<Hit<T>>;
}

/// Keeps the nearest candidate; equal distances resolve to the lower triangle index.
#[inline]
fn closer<T: Real>(t: T, index: u32, best: &Option<(T, u32, u32)>) -> bool {
    match best {
        None => true,
        Some((bt, bi, _)) => t < *bt || (t == *bt && index < *bi),
    }
}

pub fn build_bvh<T: Real>(meshes: &[TriangleMesh<T>]) -> Result<Bvh<T>> {
    Bvh::build(meshes)
}

impl<T: Real> Bvh<T> {
    pub fn build(meshes: &[TriangleMesh<T>]) -> Result<Self> {
        let mut triangles = Vec::new();
        for mesh in meshes {
            mesh.validate()?;
            for t in 0..mesh.triangles.len() {
                let index = u32::try_from(triangles.len())
                    .map_err(|_| Error::validation("meshes", "more than u32::MAX triangles"))?;
                triangles.push(Triangle {
                    v: mesh.triangle(t),
                    object_id: mesh.object_id,
                    index,
                });
            }
        }
        if triangles.is_empty() {
            return Err(Error::NoGeometry);
        }

        let centroids: Vec<Vec3<T>> = triangles
            .iter()
            .map(|t| (t.v[0] + t.v[1] + t.v[2]) / T::lit(3.0))
            .collect();
        let mut order: Vec<u32> = (0..triangles.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * triangles.len() / LEAF_SIZE + 1);
        build_node(&triangles, &centroids, &mut order, 0, 0, &mut nodes);

        let triangles = order.iter().map(|&i| triangles[i as usize]).collect();
        Ok(Bvh { nodes, triangles })
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn bounds(&self) -> Aabb<T> {
        self.nodes[0].bounds
    }

    /// Checks that every leaf box contains its triangles' vertices.
    pub fn leaves_contain_triangles(&self) -> bool {
        self.nodes.iter().filter(|n| n.count > 0).all(|n| {
            let start = n.offset as usize;
            self.triangles[start..start + n.count as usize]
                .iter()
                .all(|t| t.v.iter().all(|&v| n.bounds.contains(v)))
        })
    }

    pub fn intersect(&self, ray: &Ray<T>, max_range: T) -> Option<Hit<T>> {
        let inv_dir = Vec3::new(
            T::one() / ray.direction.x,
            T::one() / ray.direction.y,
            T::one() / ray.direction.z,
        );
        let min_dist = T::lit(MIN_HIT_DISTANCE);
        let mut best: Option<(T, u32, u32)> = None;
        let mut limit = max_range;
        // (node, entry distance); children are pushed far-first.
        let mut stack = [(0u32, T::zero()); 2 * SAH_MAX_DEPTH + 64];
        let root_entry = self.nodes[0].bounds.entry(ray.origin, inv_dir, limit)?;
        stack[0] = (0, root_entry);
        let mut top = 1usize;

        while top > 0 {
            top -= 1;
            let (index, entry) = stack[top];
            // `>` rather than `>=`: a box exactly at the current best may hold a tie.
            if entry > limit {
                continue;
            }
            let node = &self.nodes[index as usize];
            if node.count > 0 {
                let start = node.offset as usize;
                for (k, tri) in self.triangles[start..start + node.count as usize]
                    .iter()
                    .enumerate()
                {
                    if let Some(t) = intersect_triangle(ray, tri.v[0], tri.v[1], tri.v[2]) {
                        if t > min_dist && t <= max_range && closer(t, tri.index, &best) {
                            best = Some((t, tri.index, (start + k) as u32));
                            limit = t;
                        }
                    }
                }
                continue;
            }
            let left = index + 1;
            let right = node.offset;
            let tl = self.nodes[left as usize].bounds.entry(ray.origin, inv_dir, limit);
            let tr = self.nodes[right as usize].bounds.entry(ray.origin, inv_dir, limit);
            match (tl, tr) {
                (Some(a), Some(b)) => {
                    let (near, far) = if b < a { ((right, b), (left, a)) } else { ((left, a), (right, b)) };
                    stack[top] = far;
                    stack[top + 1] = near;
                    top += 2;
                }
                (Some(a), None) => {
                    stack[top] = (left, a);
                    top += 1;
                }
                (None, Some(b)) => {
                    stack[top] = (right, b);
                    top += 1;
                }
                (None, None) => {}
            }
        }

        best.map(|(t, index, slot)| Hit {
            distance: t,
            point: ray.at(t),
            object_id: self.triangles[slot as usize].object_id,
            triangle: index,
        })
    }

    /// Reference O(n) scan over every triangle.
    pub fn intersect_brute_force(&self, ray: &Ray<T>, max_range: T) -> Option<Hit<T>> {
        let min_dist = T::lit(MIN_HIT_DISTANCE);
        let mut best: Option<(T, u32, u32)> = None;
        for (slot, tri) in self.triangles.iter().enumerate() {
            if let Some(t) = intersect_triangle(ray, tri.v[0], tri.v[1], tri.v[2]) {
                if t > min_dist && t <= max_range && closer(t, tri.index, &best) {
                    best = Some((t, tri.index, slot as u32));
                }
            }
        }
        best.map(|(t, index, slot)| Hit {
            distance: t,
            point: ray.at(t),
            object_id: self.triangles[slot as usize].object_id,
            triangle: index,
        })
    }
}

fn build_node<T: Real>(
    triangles: &[Triangle<T>],
    centroids: &[Vec3<T>],
    order: &mut [u32],
    first: usize,
    depth: usize,
    nodes: &mut Vec<Node<T>>,
) -> u32 {
    let mut bounds = Aabb::empty();
    let mut cbounds = Aabb::empty();
    for &i in order.iter() {
        for &v in &triangles[i as usize].v {
            bounds.grow(v);
        }
        cbounds.grow(centroids[i as usize]);
    }
    let slot = nodes.len() as u32;
    nodes.push(Node {
        bounds: bounds.padded(),
        offset: first as u32,
        count: order.len() as u32,
    });
    if order.len() <= LEAF_SIZE {
        return slot;
    }

    // Deep SAH chains switch to median splits, which bound the depth
    // (and so the traversal stack) logarithmically.
    let sah = if depth < SAH_MAX_DEPTH { sah_split(triangles, centroids, order, &cbounds) } else { None };
    let mid = match sah {
        Some(mid) => mid,
        None => median_split(centroids, order, &cbounds),
    };
    let (lo, hi) = order.split_at_mut(mid);
    build_node(triangles, centroids, lo, first, depth + 1, nodes);
    let right = build_node(triangles, centroids, hi, first + mid, depth + 1, nodes);
    let node = &mut nodes[slot as usize];
    node.offset = right;
    node.count = 0;
    slot
}

fn longest_axis<T: Real>(b: &Aabb<T>) -> usize {
    let e = b.max - b.min;
    if e.x >= e.y && e.x >= e.z {
        0
    } else if e.y >= e.z {
        1
    } else {
        2
    }
}

fn median_split<T: Real>(centroids: &[Vec3<T>], order: &mut [u32], cbounds: &Aabb<T>) -> usize {
    let axis = longest_axis(cbounds);
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .partial_cmp(&centroids[b as usize][axis])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    mid
}

/// Cheapest binned SAH partition over all three axes. Reorders `order` so the
/// left part comes first and returns the left count; `None` when no bin
/// boundary separates the centroids.
fn sah_split<T: Real>(
    triangles: &[Triangle<T>],
    centroids: &[Vec3<T>],
    order: &mut [u32],
    cbounds: &Aabb<T>,
) -> Option<usize> {
    let nb = T::from_usize_lossy(SAH_BINS);
    let bin_of = |c: T, axis: usize| -> usize {
        let lo = cbounds.min[axis];
        let span = cbounds.max[axis] - lo;
        let b = ((c - lo) / span * nb).to_usize().unwrap_or(0);
        b.min(SAH_BINS - 1)
    };
    let mut best: Option<(T, usize, usize)> = None;
    for axis in 0..3 {
        if cbounds.max[axis] - cbounds.min[axis] <= T::zero() {
            continue;
        }
        let mut boxes = [Aabb::empty(); SAH_BINS];
        let mut counts = [0usize; SAH_BINS];
        for &i in order.iter() {
            let b = bin_of(centroids[i as usize][axis], axis);
            counts[b] += 1;
            for &v in &triangles[i as usize].v {
                boxes[b].grow(v);
            }
        }
        // Sweep from the right to get suffix areas, then from the left.
        let mut right_area = [T::zero(); SAH_BINS];
        let mut right_count = [0usize; SAH_BINS];
        let mut acc = Aabb::empty();
        let mut n = 0;
        for b in (1..SAH_BINS).rev() {
            acc = acc.union(&boxes[b]);
            n += counts[b];
            right_area[b] = acc.half_area();
            right_count[b] = n;
        }
        let mut acc = Aabb::empty();
        let mut n = 0;
        for b in 0..SAH_BINS - 1 {
            acc = acc.union(&boxes[b]);
            n += counts[b];
            let rn = right_count[b + 1];
            if n == 0 || rn == 0 {
                continue;
            }
            let cost = acc.half_area() * T::from_usize_lossy(n) + right_area[b + 1] * T::from_usize_lossy(rn);
            if best.is_none_or(|(c, _, _)| cost < c) {
                best = Some((cost, axis, b));
            }
        }
    }
    let (_, axis, split_bin) = best?;
    // Stable partition keeps the build deterministic.
    let (left, right): (Vec<u32>, Vec<u32>) = order
        .iter()
        .partition(|&&i| bin_of(centroids[i as usize][axis], axis) <= split_bin);
    let mid = left.len();
    order[..mid].copy_from_slice(&left);
    order[mid..].copy_from_slice(&right);
    Some(mid)
}

impl<T: Real> RayCast<T> for Bvh<T> {
    fn intersect(&self, ray: &Ray<T>, max_range: T) -> Option<Hit<T>> {
        Bvh::intersect(self, ray, max_range)
    }
}

/// Several independently built structures queried as one scene.
///
/// Triangle indices of later layers are offset past all earlier layers, so
/// ties resolve exactly as if the meshes had been concatenated in layer order.
#[derive(Debug, Clone, Copy)]
pub struct SceneLayers<'a, T> {
    layers: &'a [&'a Bvh<T>],
}

impl<'a, T: Real> SceneLayers<'a, T> {
    pub fn new(layers: &'a [&'a Bvh<T>]) -> Self {
        SceneLayers { layers }
    }
}

impl<T: Real> RayCast<T> for SceneLayers<'_, T> {
    fn intersect(&self, ray: &Ray<T>, max_range: T) -> Option<Hit<T>> {
        let mut best: Option<Hit<T>> = None;
        let mut offset = 0u32;
        for layer in self.layers {
            let limit = best.map_or(max_range, |b| b.distance);
            if let Some(mut hit) = layer.intersect(ray, limit) {
                hit.triangle += offset;
                // Strictly nearer only: on a tie the earlier layer has the lower index.
                if best.is_none_or(|b| hit.distance < b.distance) {
                    best = Some(hit);
                }
            }
            offset += layer.triangle_count() as u32;
        }
        best
    }
}

/// Scene without geometry; every ray misses.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmptyScene;

impl<T: Real> RayCast<T> for EmptyScene {
    fn intersect(&self, _ray: &Ray<T>, _max_range: T) -> Option<Hit<T>> {
        None
    }
}
