//! Batch front end for the pointing-jitter toolkit.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 data error, 4 numerical
//! divergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fsojitter::linkbudget::LinkGeometry;
use fsojitter::tracker::Boresight;
use fsojitter_cli::commands::{
    self, CalibrationSource, LinkBudgetArgs, TrackArgs,
};
use fsojitter_cli::config::RunConfig;
use fsojitter_cli::error::CliError;

#[derive(Parser)]
#[command(
    name = "fsojitter",
    version,
    about = "Pointing-jitter simulation and link-budget analysis for airborne FSO links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the platform model and emit trajectory/pointing CSVs.
    Simulate {
        /// Run configuration file (`key = value` lines).
        #[arg(long)]
        config: PathBuf,
        /// Overrides sim.seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: output.directory from the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract a pointing series from a directory of .pgm frames.
    Track {
        /// Directory of 8-bit binary graymaps, lexicographic order.
        #[arg(long)]
        frames: PathBuf,
        /// Frame rate of the recording, Hz.
        #[arg(long)]
        fps: f64,
        /// Detection threshold, 0-255.
        #[arg(long, default_value_t = 40)]
        threshold: u8,
        /// Transmitter-to-receiver distance for the angular conversion, m.
        #[arg(long)]
        distance_m: f64,
        /// Vibration-free reference frame for calibration.
        #[arg(long, requires = "ref_diameter_m")]
        ref_frame: Option<PathBuf>,
        /// Physical diameter of the reference footprint, m.
        #[arg(long)]
        ref_diameter_m: Option<f64>,
        /// Direct pixel scale (alternative to a reference frame), m/px.
        #[arg(long, conflicts_with = "ref_frame")]
        meters_per_pixel: Option<f64>,
        /// Zero reference: "mean" or "first-frame".
        #[arg(long, default_value = "mean")]
        boresight: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Summary statistics of an existing pointing CSV.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geometric and misalignment losses for a link geometry.
    Linkbudget {
        #[arg(long)]
        range_m: f64,
        /// Full beam divergence angle, rad.
        #[arg(long)]
        divergence_rad: f64,
        /// Receiver aperture diameter, m.
        #[arg(long)]
        aperture_m: f64,
        /// Rayleigh jitter scale; enables the expected pointing loss, mrad.
        #[arg(long)]
        sigma_mrad: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Transmit power for an absolute received-power line, dBm.
        #[arg(long)]
        tx_power_dbm: Option<f64>,
        /// Sweep start range; with --curve-end-m emits a log-spaced curve, m.
        #[arg(long, requires = "curve_end_m")]
        curve_start_m: Option<f64>,
        #[arg(long)]
        curve_end_m: Option<f64>,
        #[arg(long, default_value_t = 25)]
        curve_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare measured and predicted pointing CSVs.
    Compare {
        #[arg(long)]
        measured: PathBuf,
        #[arg(long)]
        predicted: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, seed, out } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.sim.seed = seed;
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
            let run = commands::cmd_simulate(&cfg, &out_dir)?;
            print!("{}", run.report);
            eprintln!("wrote {}", out_dir.join("trajectory.csv").display());
            eprintln!("wrote {}", out_dir.join("pointing.csv").display());
            eprintln!("wrote {}", out_dir.join("stats.txt").display());
            Ok(())
        }
        Command::Track {
            frames,
            fps,
            threshold,
            distance_m,
            ref_frame,
            ref_diameter_m,
            meters_per_pixel,
            boresight,
            out,
        } => {
            let calibration = match (ref_frame, meters_per_pixel) {
                (Some(path), None) => {
                    CalibrationSource::ReferenceFrame(path, ref_diameter_m.unwrap())
                }
                (None, Some(scale)) => CalibrationSource::MetersPerPixel(scale),
                (None, None) => {
                    return Err(CliError::usage(
                        "calibration required: pass --ref-frame with --ref-diameter-m, or --meters-per-pixel",
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let boresight: Boresight = boresight.parse().map_err(CliError::usage)?;
            let args = TrackArgs {
                frames_dir: frames,
                fps,
                threshold,
                distance_m,
                calibration,
                boresight,
            };
            let run = commands::cmd_track(&args, &out)?;
            print!("{}", run.report);
            eprintln!("wrote {}", out.join("pointing.csv").display());
            Ok(())
        }
        Command::Stats { input, out } => {
            let (_, text) = commands::cmd_stats(&input, out.as_deref())?;
            print!("{text}");
            Ok(())
        }
        Command::Linkbudget {
            range_m,
            divergence_rad,
            aperture_m,
            sigma_mrad,
            mc_samples,
            seed,
            tx_power_dbm,
            curve_start_m,
            curve_end_m,
            curve_points,
            out,
        } => {
            let mut geometry = LinkGeometry::new(range_m, divergence_rad, aperture_m)
                .map_err(|e| CliError::usage(e.to_string()))?;
            if let Some(dbm) = tx_power_dbm {
                geometry = geometry.with_transmit_power_dbm(dbm);
            }
            let curve = match (curve_start_m, curve_end_m) {
                (Some(start), Some(end)) => Some((start, end, curve_points)),
                _ => None,
            };
            let args = LinkBudgetArgs {
                geometry,
                sigma_mrad,
                mc_samples,
                seed,
                curve,
            };
            let run = commands::cmd_linkbudget(&args, out.as_deref())?;
            print!("{}", run.report);
            Ok(())
        }
        Command::Compare {
            measured,
            predicted,
            out,
        } => {
            let report = commands::cmd_compare(&measured, &predicted, out.as_deref())?;
            print!("{}", report.text());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{e}");
            eprintln!();
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
