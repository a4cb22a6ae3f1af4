use std::path::{Path, PathBuf};

use dt_lidar_core::dataset::{load_features, FORMAT_VERSION};
use dt_lidar_core::metrics::{dataset_gap, DatasetRef, GapConfig, GapReport};
use dt_lidar_core::stats::{normalized_comparison, summarize, DatasetSummary, NormalizedComparison};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct GapArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    pub features_a: Option<PathBuf>,
    pub features_b: Option<PathBuf>,
    pub metrics: GapConfig,
    pub report: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsBlock {
    pub a: DatasetSummary,
    pub b: DatasetSummary,
    pub normalized: NormalizedComparison,
    /// What the point-count statistic measures.
    pub point_density_unit: String,
    /// How `normalized` was scaled.
    pub normalization: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Versions {
    pub dt_lidar: String,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetNames {
    pub a: String,
    pub b: String,
}

/// Everything `gap` writes to its report file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapFileReport {
    pub raw: GapReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latent: Option<GapReport>,
    pub stats: StatsBlock,
    pub config: GapConfig,
    pub datasets: DatasetNames,
    pub versions: Versions,
}

impl GapFileReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        GapFileReport::from_json(&text).map_err(|e| CliError::Report {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }
}

/// Computes the gap report without writing it.
pub fn run_gap(args: &GapArgs) -> CliResult<GapFileReport> {
    args.metrics.validate()?;
    let features = match (&args.features_a, &args.features_b) {
        (Some(fa), Some(fb)) => Some((load_features(fa)?, load_features(fb)?)),
        (None, None) => None,
        _ => {
            return Err(CliError::usage(
                "features",
                "--features-a and --features-b must be given together",
            ))
        }
    };
    let a = DatasetRef::open(&args.a)?;
    let b = DatasetRef::open(&args.b)?;
    let result = dataset_gap(
        &a,
        &b,
        features.as_ref().map(|(fa, fb)| (fa, fb)),
        &args.metrics,
    )?;
    let sa = summarize(&a.root, &a.manifest)?;
    let sb = summarize(&b.root, &b.manifest)?;
    Ok(GapFileReport {
        raw: result.raw,
        latent: result.latent,
        stats: StatsBlock {
            a: sa,
            b: sb,
            normalized: normalized_comparison(&sa, &sb),
            point_density_unit: "points per frame".into(),
            normalization: "each metric divided by the larger of the two dataset means".into(),
        },
        config: args.metrics,
        datasets: DatasetNames {
            a: a.manifest.name.clone(),
            b: b.manifest.name.clone(),
        },
        versions: Versions {
            dt_lidar: env!("CARGO_PKG_VERSION").into(),
            format_version: FORMAT_VERSION,
        },
    })
}

/// Computes the gap report and writes it as JSON to `args.report`.
pub fn cmd_gap(args: &GapArgs) -> CliResult<GapFileReport> {
    let report = run_gap(args)?;
    if let Some(parent) = args.report.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(&args.report, report.to_json()).map_err(|e| CliError::io(&args.report, e))?;
    Ok(report)
}
