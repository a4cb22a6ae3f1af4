use std::path::Path;

use dt_lidar_core::dataset::read_manifest;
use dt_lidar_core::stats::{summarize, DatasetSummary};

use crate::error::CliResult;

/// Summary statistics of a dataset's primary stream.
pub fn cmd_stats(dataset: &Path) -> CliResult<DatasetSummary> {
    let manifest = read_manifest(dataset)?;
    Ok(summarize(dataset, &manifest)?)
}
