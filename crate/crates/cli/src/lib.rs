//! Command-line front end of the digital-twin LiDAR toolkit.
//!
//! Each subcommand is also callable as a library function so tests and
//! scripts can drive the pipeline without spawning processes.

pub mod commands;
pub mod demo;
mod error;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use dt_lidar_core::metrics::{Bandwidth, EmdMode, GapConfig, DEFAULT_FRAME_PAIRS, DEFAULT_POINTS_PER_FRAME, DEFAULT_POOL_SIZE};

pub use commands::{cmd_gap, cmd_simulate, cmd_stats, run_gap, GapArgs, GapFileReport, RunConfig, SimulationSummary};
pub use error::{CliError, CliResult};
pub use report::{cmd_report, render_svg};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "DT_LIDAR_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dt-lidar", version, about = "Digital-twin LiDAR simulation and sim-to-real gap analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate sensors over a scene and write a dataset.
    Simulate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        sensors: PathBuf,
        #[arg(long)]
        frames: usize,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write a merged multi-sensor stream.
        #[arg(long)]
        merge: bool,
        /// Fraction of frames assigned to the train split.
        #[arg(long, default_value_t = 0.8)]
        split: f64,
    },
    /// Print frame-level statistics of a dataset as JSON.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Measure the distribution gap between two datasets.
    Gap {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        features_a: Option<PathBuf>,
        #[arg(long)]
        features_b: Option<PathBuf>,
        /// RBF bandwidth for MMD: `auto` (median heuristic) or a positive number.
        #[arg(long, default_value = "auto")]
        bandwidth: Bandwidth,
        #[arg(long, default_value_t = DEFAULT_POINTS_PER_FRAME)]
        points_per_frame: usize,
        #[arg(long, default_value_t = DEFAULT_FRAME_PAIRS)]
        frame_pairs: usize,
        /// Samples per side for MMD, EMD and FD.
        #[arg(long, default_value_t = DEFAULT_POOL_SIZE)]
        pool_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "exact")]
        emd: EmdMode,
        #[arg(long)]
        report: PathBuf,
    },
    /// Render a gap report as an SVG figure.
    Report {
        #[arg(long)]
        json: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a small example scene and sensor file.
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
}

/// Sizes the global rayon pool from `DT_LIDAR_THREADS`, if set.
pub fn init_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::usage(THREADS_ENV, format!("{value:?} is not a positive integer")))?;
    // Fails only if the pool already exists, in which case it is left as is.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { scene, sensors, frames, dt, seed, out, merge, split } => {
            let summary = cmd_simulate(&RunConfig { scene, sensors, frames, dt, seed, out, merge, split })?;
            eprintln!(
                "simulated {} frames in {:.2} s: {:.2} frames/s, {:.3e} rays/s",
                summary.manifest.len(),
                summary.seconds,
                summary.frames_per_second(),
                summary.rays_per_second()
            );
        }
        Command::Stats { dataset } => {
            let summary = cmd_stats(&dataset)?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
        }
        Command::Gap {
            a,
            b,
            features_a,
            features_b,
            bandwidth,
            points_per_frame,
            frame_pairs,
            pool_size,
            seed,
            emd,
            report,
        } => {
            let args = GapArgs {
                a,
                b,
                features_a,
                features_b,
                metrics: GapConfig { bandwidth, points_per_frame, frame_pairs, pool_size, seed, emd_mode: emd },
                report,
            };
            let r = cmd_gap(&args)?;
            eprintln!(
                "raw: cd {:.6} mmd {:.6e} emd {:.6} fd {:.6}",
                r.raw.cd, r.raw.mmd, r.raw.emd, r.raw.fd
            );
            if let Some(l) = &r.latent {
                eprintln!("latent: cd {:.6} mmd {:.6e} emd {:.6} fd {:.6}", l.cd, l.mmd, l.emd, l.fd);
            }
        }
        Command::Report { json, out } => cmd_report(&json, &out)?,
        Command::Demo { out } => {
            let files = demo::write_demo(&out, &demo::DemoOptions::default())?;
            eprintln!("wrote {} and {}", files.scene.display(), files.sensors.display());
        }
    }
    Ok(())
}
