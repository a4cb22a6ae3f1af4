use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::obb::OrientedBox;
use super::LanePolyline;
use crate::geometry::{TriangleMesh, Vec3, BOX_TRIANGLES};
use crate::{rng, Error, Result};

/// Sampled dimensions never fall below this, in meters.
pub const MIN_ACTOR_DIM: f64 = 0.2;
/// Spawning gives up after this many consecutive rejected placements.
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 1000;
/// Object ids at or above this value tag actor meshes; static geometry uses lower ids.
pub const ACTOR_OBJECT_ID_BASE: u32 = 1 << 20;

/// A kind of road user and its size/speed distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorClass {
    pub name: String,
    /// Mean (length, width, height) in meters.
    #[serde(rename = "mean_dims_m")]
    pub mean_dims: [f64; 3],
    #[serde(rename = "dims_stddev_m")]
    pub dims_stddev: [f64; 3],
    pub spawn_weight: f64,
    /// (min, max) in m/s.
    #[serde(rename = "speed_range_mps")]
    pub speed_range: [f64; 2],
    /// Optional OBJ mesh stretched to each actor's box instead of a plain cuboid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<String>,
}

impl ActorClass {
    pub fn new(name: &str, mean_dims: [f64; 3], dims_stddev: [f64; 3], spawn_weight: f64, speed_range: [f64; 2]) -> Self {
        ActorClass {
            name: name.to_owned(),
            mean_dims,
            dims_stddev,
            spawn_weight,
            speed_range,
            mesh: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(char::is_whitespace) {
            return Err(Error::validation("name", format!("{:?} must be a non-empty single word", self.name)));
        }
        if self.mean_dims.iter().any(|&d| !(d.is_finite() && d > 0.0)) {
            return Err(Error::validation("mean_dims_m", "dimensions must be positive"));
        }
        if self.dims_stddev.iter().any(|&d| !(d.is_finite() && d >= 0.0)) {
            return Err(Error::validation("dims_stddev_m", "must be >= 0"));
        }
        if !(self.spawn_weight.is_finite() && self.spawn_weight >= 0.0) {
            return Err(Error::validation("spawn_weight", "must be >= 0"));
        }
        let [lo, hi] = self.speed_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return Err(Error::validation("speed_range_mps", "need 0 <= min <= max"));
        }
        Ok(())
    }
}

/// A spawned road user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActorInstance {
    pub class_name: String,
    /// Box center; the box bottom rests on the lane.
    pub center: Vec3<f64>,
    /// (length, width, height) in meters.
    pub dims: [f64; 3],
    /// Yaw about +z in radians, within [-pi, pi].
    pub heading: f64,
    pub speed: f64,
    pub lane_index: usize,
    pub arc_position: f64,
}

impl ActorInstance {
    pub fn oriented_box(&self) -> OrientedBox {
        OrientedBox {
            center: self.center,
            dims: self.dims,
            heading: self.heading,
        }
    }

    fn place(&mut self, lane: &LanePolyline, arc: f64) {
        let (p, heading) = lane.sample(arc);
        self.arc_position = arc;
        self.center = p + Vec3::new(0.0, 0.0, 0.5 * self.dims[2]);
        self.heading = heading;
    }
}

/// Uniform spatial hash over actor footprints for the overlap check.
struct FootprintGrid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    max_radius: f64,
}

impl FootprintGrid {
    fn new(cell: f64) -> Self {
        FootprintGrid {
            cell,
            cells: HashMap::new(),
            max_radius: 0.0,
        }
    }

    fn key(&self, x: f64, y: f64) -> (i64, i64) {
        ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64)
    }

    fn overlaps(&self, candidate: &OrientedBox, placed: &[ActorInstance]) -> bool {
        let reach = candidate.footprint_radius() + self.max_radius;
        let c = candidate.center;
        let (x0, y0) = self.key(c.x - reach, c.y - reach);
        let (x1, y1) = self.key(c.x + reach, c.y + reach);
        for gx in x0..=x1 {
            for gy in y0..=y1 {
                let Some(ids) = self.cells.get(&(gx, gy)) else {
                    continue;
                };
                if ids
                    .iter()
                    .any(|&i| placed[i].oriented_box().footprints_overlap(candidate))
                {
                    return true;
                }
            }
        }
        false
    }

    fn insert(&mut self, b: &OrientedBox, index: usize) {
        let key = self.key(b.center.x, b.center.y);
        self.cells.entry(key).or_default().push(index);
        self.max_radius = self.max_radius.max(b.footprint_radius());
    }
}

fn validate_inputs(lanes: &[LanePolyline], classes: &[ActorClass]) -> Result<()> {
    if lanes.is_empty() {
        return Err(Error::validation("lanes", "at least one lane required"));
    }
    for (i, lane) in lanes.iter().enumerate() {
        lane.validate().map_err(|e| prefix(e, &format!("lanes[{i}]")))?;
    }
    for (i, class) in classes.iter().enumerate() {
        class.validate().map_err(|e| prefix(e, &format!("classes[{i}]")))?;
    }
    if !classes.iter().any(|c| c.spawn_weight > 0.0) {
        return Err(Error::validation("classes", "no class with positive spawn_weight"));
    }
    Ok(())
}

pub(crate) fn prefix(e: Error, path: &str) -> Error {
    match e {
        Error::Validation { field, reason } => Error::Validation {
            field: format!("{path}.{field}"),
            reason,
        },
        other => other,
    }
}

/// Places up to `target_count` non-overlapping actors on random lane positions.
pub fn spawn_actors(
    lanes: &[LanePolyline],
    classes: &[ActorClass],
    target_count: usize,
    rng_seed: u64,
) -> Result<Vec<ActorInstance>> {
    validate_inputs(lanes, classes)?;
    let mut rng = rng::stream(rng_seed, &[]);
    let weights = WeightedIndex::new(classes.iter().map(|c| c.spawn_weight))
        .map_err(|e| Error::validation("classes", e.to_string()))?;
    let lengths: Vec<f64> = lanes.iter().map(LanePolyline::length).collect();
    let mut grid = FootprintGrid::new(8.0);
    let mut actors: Vec<ActorInstance> = Vec::with_capacity(target_count);
    let mut rejections = 0;

    // Class, size and speed are drawn once per slot; only the position is
    // redrawn on overlap, so rejections do not skew the class mix.
    'slots: while actors.len() < target_count {
        let class = &classes[weights.sample(&mut rng)];
        let mut dims = [0.0; 3];
        for (k, d) in dims.iter_mut().enumerate() {
            let g = Normal::new(class.mean_dims[k], class.dims_stddev[k]).expect("validated stddev");
            *d = g.sample(&mut rng).max(MIN_ACTOR_DIM);
        }
        let [lo, hi] = class.speed_range;
        let speed = lo + (hi - lo) * rng.random::<f64>();
        let mut actor = ActorInstance {
            class_name: class.name.clone(),
            center: Vec3::zero(),
            dims,
            heading: 0.0,
            speed,
            lane_index: 0,
            arc_position: 0.0,
        };
        loop {
            let lane_index = rng.random_range(0..lanes.len());
            let arc = rng.random::<f64>() * lengths[lane_index];
            actor.lane_index = lane_index;
            actor.place(&lanes[lane_index], arc);
            let footprint = actor.oriented_box();
            if !grid.overlaps(&footprint, &actors) {
                grid.insert(&footprint, actors.len());
                actors.push(actor);
                break;
            }
            rejections += 1;
            if rejections >= MAX_CONSECUTIVE_REJECTIONS {
                break 'slots;
            }
        }
        rejections = 0;
    }
    Ok(actors)
}

/// Advances every actor `speed * dt` along its lane, wrapping to the lane start.
pub fn step_actors(actors: &[ActorInstance], lanes: &[LanePolyline], dt: f64) -> Vec<ActorInstance> {
    actors
        .iter()
        .map(|a| {
            let mut next = a.clone();
            if let Some(lane) = lanes.get(a.lane_index) {
                let length = lane.length();
                let arc = (a.arc_position + a.speed * dt).rem_euclid(length);
                next.place(lane, arc);
            }
            next
        })
        .collect()
}

fn box_corners(actor: &ActorInstance) -> Vec<Vec3<f64>> {
    let b = actor.oriented_box();
    let (s, c) = b.heading.sin_cos();
    (0..8)
        .map(|i| {
            let half = |k: usize, bit: usize| if i & bit == 0 { -0.5 * b.dims[k] } else { 0.5 * b.dims[k] };
            let (u, v, w) = (half(0, 1), half(1, 2), half(2, 4));
            b.center + Vec3::new(c * u - s * v, s * u + c * v, w)
        })
        .collect()
}

/// One closed 12-triangle box per actor, tagged `ACTOR_OBJECT_ID_BASE + i`.
pub fn actor_meshes(actors: &[ActorInstance]) -> Vec<TriangleMesh<f64>> {
    actor_meshes_with_templates(actors, &HashMap::new())
}

/// Like [`actor_meshes`], but actors whose class has a template mesh get that
/// mesh stretched to their box instead of a cuboid.
pub fn actor_meshes_with_templates(
    actors: &[ActorInstance],
    templates: &HashMap<String, TriangleMesh<f64>>,
) -> Vec<TriangleMesh<f64>> {
    actors
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let id = ACTOR_OBJECT_ID_BASE + i as u32;
            match templates.get(&a.class_name).and_then(|t| Some((t, t.bounds()?))) {
                Some((template, (lo, hi))) => fit_template(template, lo, hi, a, id),
                None => TriangleMesh::new(box_corners(a), BOX_TRIANGLES.to_vec(), id),
            }
        })
        .collect()
}

fn fit_template(
    template: &TriangleMesh<f64>,
    lo: Vec3<f64>,
    hi: Vec3<f64>,
    actor: &ActorInstance,
    object_id: u32,
) -> TriangleMesh<f64> {
    let (s, c) = actor.heading.sin_cos();
    let mid = (lo + hi) * 0.5;
    let extent = hi - lo;
    let vertices = template
        .vertices
        .iter()
        .map(|&v| {
            let n = v - mid;
            let scaled = Vec3::new(
                if extent.x > 0.0 { n.x / extent.x * actor.dims[0] } else { 0.0 },
                if extent.y > 0.0 { n.y / extent.y * actor.dims[1] } else { 0.0 },
                if extent.z > 0.0 { n.z / extent.z * actor.dims[2] } else { 0.0 },
            );
            actor.center + Vec3::new(c * scaled.x - s * scaled.y, s * scaled.x + c * scaled.y, scaled.z)
        })
        .collect();
    TriangleMesh::new(vertices, template.triangles.clone(), object_id)
}
