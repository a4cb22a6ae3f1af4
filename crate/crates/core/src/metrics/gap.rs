//! Dataset-level gap estimation in raw point space and latent feature space.
//!
//! Raw space: `frame_pairs` frame draws per dataset, each cloud subsampled to
//! `points_per_frame`. Chamfer distance is averaged over the drawn pairs; the
//! other metrics use a pool of all drawn subsamples, reduced to a common size
//! of at most `pool_size` points per side. Both datasets consume identical
//! random streams, so comparing a dataset with itself yields identical samples.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chamfer, emd_detailed, frechet, mmd_rbf_detailed, Bandwidth, EmdMode, PointSet};
use crate::dataset::{read_points, DatasetManifest, FeatureMatrix};
use crate::{rng, Error, Result};

pub const DEFAULT_POINTS_PER_FRAME: usize = 4096;
pub const DEFAULT_FRAME_PAIRS: usize = 100;
pub const DEFAULT_POOL_SIZE: usize = 1024;

const CD_VARIANT: &str = "mean-nn-euclidean-symmetric";
const MMD_ESTIMATOR: &str = "biased-v-statistic-rbf";

const TAG_FRAMES: u64 = 1;
const TAG_SUBSAMPLE: u64 = 2;
const TAG_POOL: u64 = 3;
const TAG_LATENT: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapConfig {
    pub bandwidth: Bandwidth,
    pub points_per_frame: usize,
    pub frame_pairs: usize,
    /// Upper bound on samples per side for MMD, EMD and FD.
    pub pool_size: usize,
    pub seed: u64,
    pub emd_mode: EmdMode,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig {
            bandwidth: Bandwidth::Auto,
            points_per_frame: DEFAULT_POINTS_PER_FRAME,
            frame_pairs: DEFAULT_FRAME_PAIRS,
            pool_size: DEFAULT_POOL_SIZE,
            seed: 0,
            emd_mode: EmdMode::Exact,
        }
    }
}

impl GapConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("points_per_frame", self.points_per_frame),
            ("frame_pairs", self.frame_pairs),
            ("pool_size", self.pool_size),
        ] {
            if v == 0 {
                return Err(Error::validation(field, "must be >= 1"));
            }
        }
        if let Bandwidth::Fixed(s) = self.bandwidth {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::validation("bandwidth", format!("{s} must be > 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Raw,
    Latent,
}

/// Settings that produced a [`GapReport`], echoed so the report is self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    pub bandwidth_mode: Bandwidth,
    /// Kernel bandwidth actually used.
    pub bandwidth: f64,
    pub points_per_frame: usize,
    pub frame_pairs: usize,
    /// Pairs that contributed to CD (pairs with an empty cloud are skipped).
    pub frame_pairs_used: usize,
    pub pool_size: usize,
    /// Samples per side entering MMD, EMD and FD.
    pub samples: usize,
    pub seed: u64,
    pub emd_mode: EmdMode,
    pub emd_iterations: usize,
    pub emd_converged: bool,
    pub cd_variant: String,
    pub mmd_estimator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapReport {
    pub cd: f64,
    pub mmd: f64,
    pub emd: f64,
    pub fd: f64,
    pub space: Space,
    pub config: ReportConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub raw: GapReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latent: Option<GapReport>,
}

/// A dataset on disk together with its validated manifest.
#[derive(Debug, Clone)]
pub struct DatasetRef {
    pub root: PathBuf,
    pub manifest: DatasetManifest,
}

impl DatasetRef {
    pub fn open(root: &Path) -> Result<Self> {
        Ok(DatasetRef {
            root: root.to_path_buf(),
            manifest: crate::dataset::read_manifest(root)?,
        })
    }

    fn read_xyz(&self, frame: usize) -> Result<Vec<[f64; 3]>> {
        let f = read_points(&self.root, self.manifest.primary(), &self.manifest.frame_ids[frame])?;
        Ok(f.points
            .iter()
            .map(|p| [f64::from(p.position.x), f64::from(p.position.y), f64::from(p.position.z)])
            .collect())
    }
}

/// The `frame_pairs` subsampled clouds drawn from one dataset, in draw order.
fn draw_clouds(ds: &DatasetRef, cfg: &GapConfig) -> Result<Vec<Vec<[f64; 3]>>> {
    let n = ds.manifest.len();
    if n == 0 {
        return Err(Error::validation("dataset", format!("{} has no frames", ds.root.display())));
    }
    let mut frames_rng = rng::stream(cfg.seed, &[TAG_FRAMES]);
    let picks: Vec<usize> = (0..cfg.frame_pairs).map(|_| frames_rng.random_range(0..n)).collect();

    let mut unique: Vec<usize> = picks.clone();
    unique.sort_unstable();
    unique.dedup();
    let loaded: HashMap<usize, Vec<[f64; 3]>> = unique
        .par_iter()
        .map(|&f| ds.read_xyz(f).map(|pts| (f, pts)))
        .collect::<Result<_>>()?;

    Ok(picks
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let cloud = &loaded[f];
            let keep = cfg.points_per_frame.min(cloud.len());
            let mut r = rng::stream(cfg.seed, &[TAG_SUBSAMPLE, k as u64]);
            index::sample(&mut r, cloud.len(), keep)
                .into_iter()
                .map(|i| cloud[i])
                .collect()
        })
        .collect())
}

fn subsample(set: &PointSet<f64>, size: usize, seed: u64, tag: u64) -> Result<PointSet<f64>> {
    if set.len() <= size {
        return Ok(set.clone());
    }
    let mut r = rng::stream(seed, &[tag]);
    let mut picked = index::sample(&mut r, set.len(), size).into_vec();
    picked.sort_unstable();
    set.select(&picked)
}

fn pooled(clouds: &[Vec<[f64; 3]>]) -> Result<PointSet<f64>> {
    PointSet::new(3, clouds.iter().flatten().flat_map(|p| *p).collect())
}

/// MMD, EMD and FD over two equal-size samples, plus the given CD.
fn distribution_report(
    a: &PointSet<f64>,
    b: &PointSet<f64>,
    cd: f64,
    space: Space,
    cfg: &GapConfig,
    frame_pairs_used: usize,
) -> Result<GapReport> {
    let mmd = mmd_rbf_detailed(a, b, cfg.bandwidth)?;
    let emd = emd_detailed(a, b, cfg.emd_mode)?;
    let fd = frechet(a, b)?;
    Ok(GapReport {
        cd,
        mmd: mmd.value,
        emd: emd.value,
        fd,
        space,
        config: ReportConfig {
            bandwidth_mode: cfg.bandwidth,
            bandwidth: mmd.sigma,
            points_per_frame: cfg.points_per_frame,
            frame_pairs: cfg.frame_pairs,
            frame_pairs_used,
            pool_size: cfg.pool_size,
            samples: a.len(),
            seed: cfg.seed,
            emd_mode: cfg.emd_mode,
            emd_iterations: emd.iterations,
            emd_converged: emd.converged,
            cd_variant: CD_VARIANT.into(),
            mmd_estimator: MMD_ESTIMATOR.into(),
        },
    })
}

pub fn raw_gap(a: &DatasetRef, b: &DatasetRef, cfg: &GapConfig) -> Result<GapReport> {
    cfg.validate()?;
    let clouds_a = draw_clouds(a, cfg)?;
    let clouds_b = draw_clouds(b, cfg)?;

    let pair_cds: Vec<Option<f64>> = clouds_a
        .par_iter()
        .zip(&clouds_b)
        .map(|(ca, cb)| {
            if ca.is_empty() || cb.is_empty() {
                return Ok(None);
            }
            let pa = PointSet::new(3, ca.iter().flat_map(|p| *p).collect())?;
            let pb = PointSet::new(3, cb.iter().flat_map(|p| *p).collect())?;
            chamfer(&pa, &pb).map(Some)
        })
        .collect::<Result<_>>()?;
    let used: Vec<f64> = pair_cds.into_iter().flatten().collect();
    if used.is_empty() {
        return Err(Error::Metric("every drawn frame pair contains an empty cloud".into()));
    }
    let cd = used.iter().sum::<f64>() / used.len() as f64;

    let pool_a = pooled(&clouds_a)?;
    let pool_b = pooled(&clouds_b)?;
    let size = cfg.pool_size.min(pool_a.len()).min(pool_b.len());
    let sa = subsample(&pool_a, size, cfg.seed, TAG_POOL)?;
    let sb = subsample(&pool_b, size, cfg.seed, TAG_POOL)?;
    distribution_report(&sa, &sb, cd, Space::Raw, cfg, used.len())
}

/// Latent-space report; each feature row is one sample.
pub fn latent_gap(fa: &FeatureMatrix, fb: &FeatureMatrix, cfg: &GapConfig) -> Result<GapReport> {
    cfg.validate()?;
    if fa.cols != fb.cols {
        return Err(Error::DimensionMismatch(fa.cols, fb.cols));
    }
    let size = cfg.pool_size.min(fa.rows).min(fb.rows);
    let sa = subsample(&PointSet::from_features(fa)?, size, cfg.seed, TAG_LATENT)?;
    let sb = subsample(&PointSet::from_features(fb)?, size, cfg.seed, TAG_LATENT)?;
    let cd = chamfer(&sa, &sb)?;
    distribution_report(&sa, &sb, cd, Space::Latent, cfg, 0)
}

pub fn dataset_gap(
    a: &DatasetRef,
    b: &DatasetRef,
    features: Option<(&FeatureMatrix, &FeatureMatrix)>,
    cfg: &GapConfig,
) -> Result<GapResult> {
    // Check the cheap failure first.
    if let Some((fa, fb)) = features {
        if fa.cols != fb.cols {
            return Err(Error::DimensionMismatch(fa.cols, fb.cols));
        }
    }
    let raw = raw_gap(a, b, cfg)?;
    let latent = features.map(|(fa, fb)| latent_gap(fa, fb, cfg)).transpose()?;
    Ok(GapResult { raw, latent })
}

/// Pooled raw-space sample exactly as used for MMD/EMD/FD, for inspection.
pub fn raw_pool(a: &DatasetRef, b: &DatasetRef, cfg: &GapConfig) -> Result<(PointSet<f64>, PointSet<f64>)> {
    cfg.validate()?;
    let pool_a = pooled(&draw_clouds(a, cfg)?)?;
    let pool_b = pooled(&draw_clouds(b, cfg)?)?;
    let size = cfg.pool_size.min(pool_a.len()).min(pool_b.len());
    Ok((
        subsample(&pool_a, size, cfg.seed, TAG_POOL)?,
        subsample(&pool_b, size, cfg.seed, TAG_POOL)?,
    ))
}
