//! Digital-twin LiDAR toolkit.
//!
//! Simulates spinning multi-channel LiDAR sensors over triangle-mesh scenes
//! populated with lane-following actors, writes OpenPCDet-style datasets, and
//! measures the distribution gap between datasets with Chamfer distance,
//! MMD, EMD and Fréchet distance.
//!
//! Geometry, sensor simulation and metric kernels are generic over [`Real`]
//! (`f32` or `f64`); the aliases below name the common instantiations.

pub mod dataset;
mod error;
pub mod geometry;
mod real;
pub mod rng;
pub mod scene;
pub mod sensor;
pub mod stats;
pub mod metrics;

pub use error::{Error, Result};
pub use real::Real;

pub type Vec3d = geometry::Vec3<f64>;
pub type Vec3f = geometry::Vec3<f32>;
pub type Mesh = geometry::TriangleMesh<f64>;
pub type Mesh32 = geometry::TriangleMesh<f32>;
pub type Bvh = geometry::Bvh<f64>;
pub type Bvh32 = geometry::Bvh<f32>;
pub type Ray = geometry::Ray<f64>;
pub type Hit = geometry::Hit<f64>;
/// In-memory frame at simulation precision.
pub type Frame = sensor::PointCloudFrame<f64>;
/// Frame at on-disk precision.
pub type StoredFrame = sensor::PointCloudFrame<f32>;
pub type PointSet = metrics::PointSet<f64>;
pub type PointSet32 = metrics::PointSet<f32>;
