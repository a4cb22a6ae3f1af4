//! Distribution-gap metrics: Chamfer, MMD, EMD and Fréchet distance.

mod chamfer;
mod emd;
mod frechet;
mod gap;
mod kdtree;
mod mmd;
mod pointset;

pub use chamfer::chamfer;
pub use emd::{
    emd, emd_detailed, hungarian, EmdMode, EmdOutcome, EXACT_EMD_MAX_POINTS,
    SINKHORN_EPSILON_SCALE, SINKHORN_MAX_ITERATIONS, SINKHORN_TOLERANCE,
};
pub use frechet::{frechet, COVARIANCE_RIDGE};
pub use gap::{
    dataset_gap, latent_gap, raw_gap, raw_pool, DatasetRef, GapConfig, GapReport, GapResult,
    ReportConfig, Space, DEFAULT_FRAME_PAIRS, DEFAULT_POINTS_PER_FRAME, DEFAULT_POOL_SIZE,
};
pub use kdtree::KdTree;
pub use mmd::{mmd_rbf, mmd_rbf_detailed, resolve_bandwidth, Bandwidth, MmdResult};
pub use pointset::{median_pairwise_distance, PointSet};
