pub(crate) mod gap;
mod simulate;
mod stats;

pub use gap::{cmd_gap, run_gap, GapArgs, GapFileReport, StatsBlock, Versions};
pub use simulate::{cmd_simulate, RunConfig, SimulationSummary};
pub use stats::cmd_stats;
