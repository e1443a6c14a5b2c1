//! Subcommand implementations. Each returns the artifacts it wrote so tests
//! can drive the pipeline without spawning processes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Matrix6;

use fsojitter::dynamics::{
    build_system, harmonic_particular_state, integrate_bounded, natural_frequencies,
    static_deflection, PlatformState, SystemMatrices, Trajectory,
};
use fsojitter::forcing::{
    CompositeForcing, Forcing, PropellerForcing, PropellerParams, WindForcing, WindParams,
};
use fsojitter::linkbudget::{
    expected_pointing_loss_db, geometric_loss_curve, geometric_loss_db, pointing_loss_db,
    LinkGeometry,
};
use fsojitter::pointing::{self, angular_dominance_ratio, project_to_receiver, StatsSummary};
use fsojitter::tracker::{
    self, calibrate, displacement_to_pointing, extract_series, load_frames, Boresight, Calibration,
};

use crate::config::RunConfig;
use crate::csvio;
use crate::error::CliError;
use crate::report::{self, ComparisonReport};

pub fn system_from_config(cfg: &RunConfig) -> Result<SystemMatrices, CliError> {
    let input = cfg.platform.input_matrix.as_ref().map(|entries| {
        Matrix6::from_fn(|i, j| entries[i * 6 + j])
    });
    build_system(
        cfg.platform.mass_kg,
        cfg.platform.inertia_kgm2,
        cfg.platform.k_trans_n_per_m,
        cfg.platform.k_rot_nm_per_rad,
        cfg.platform.damping_alpha,
        input,
    )
    .map_err(|e| CliError::usage(e.to_string()))
}

pub fn propeller_params_from_config(cfg: &RunConfig) -> PropellerParams {
    PropellerParams {
        m_hap_kg: cfg.platform.mass_kg,
        b_drag: cfg.propeller.b_drag,
        v_hap_mps: cfg.propeller.v_hap_mps,
        a_hap_mps2: cfg.propeller.a_hap_mps2,
        ripple_fraction: cfg.propeller.ripple_fraction,
        blade_pass_hz: cfg.propeller.blade_pass_hz,
        torque_arm_m: cfg.propeller.torque_arm_m,
        hover: cfg.propeller.hover,
    }
}

pub fn wind_params_from_config(cfg: &RunConfig, seed: u64) -> WindParams {
    let mut params = WindParams::preset(cfg.wind.scenario, seed);
    if let Some(speed) = cfg.wind.mean_speed_mps {
        params.mean_speed_mps = speed;
    }
    params.area_m2 = cfg.wind.area_m2;
    params.rho_strat = cfg.wind.rho_kg_per_m3;
    params.gust_corner_hz = cfg.wind.gust_corner_hz;
    params.turbulence_intensity = cfg.wind.turbulence_intensity;
    params.force_mode = cfg.wind.force_mode;
    params.torque_arm_m = cfg.wind.torque_arm_m;
    params.axis_coupling = cfg.wind.axis_coupling;
    // Keep the gust record at least as long as the run so it never wraps.
    params.horizon_s = params.horizon_s.max(cfg.sim.duration_s + 1.0);
    params
}

/// Everything one simulation run produces.
pub struct SimulationRun {
    pub trajectory: Trajectory,
    pub pointing: fsojitter::pointing::PointingSeries,
    pub stats: StatsSummary,
    pub dominance_ratio: f64,
    pub report: String,
}

/// Builds the system and forcing from the config and integrates.
///
/// With `sim.start_at_equilibrium` the initial state is the static
/// deflection of the mean force plus the exact harmonic particular solution
/// of the blade-pass ripple, i.e. the simulation starts on the steady
/// vibration orbit instead of ringing through an onset transient.
pub fn run_simulation(cfg: &RunConfig) -> Result<SimulationRun, CliError> {
    let system = system_from_config(cfg)?;
    let seed = cfg.sim.seed;

    let mut parts: Vec<Box<dyn Forcing>> = Vec::new();
    let mut mean_force = nalgebra::Vector6::zeros();
    let mut harmonic_init = PlatformState::zero();
    let mut forcing_lines: Vec<String> = Vec::new();

    if cfg.propeller.enabled {
        let params = propeller_params_from_config(cfg);
        let propeller = PropellerForcing::new(&params).map_err(CliError::from)?;
        mean_force += propeller.mean_generalized();
        let (amp, omega) = propeller.harmonic_generalized();
        if cfg.sim.start_at_equilibrium && amp.amax() > 0.0 {
            harmonic_init = harmonic_particular_state(&system, &amp, omega)?;
        }
        forcing_lines.push(format!(
            "propeller: hover={}, ripple={} @ {} Hz, arm={} m",
            params.hover, params.ripple_fraction, params.blade_pass_hz, params.torque_arm_m
        ));
        parts.push(Box::new(propeller));
    }
    if cfg.wind.enabled {
        let params = wind_params_from_config(cfg, seed);
        let wind = WindForcing::new(params.clone()).map_err(CliError::from)?;
        mean_force += wind.mean_generalized();
        forcing_lines.push(format!(
            "wind: scenario={}, mean={} m/s, mode={}, seed={}",
            params.scenario.name(),
            params.mean_speed_mps,
            params.force_mode.name(),
            seed
        ));
        parts.push(Box::new(wind));
    }
    let forcing = CompositeForcing { parts };

    let initial = if cfg.sim.start_at_equilibrium {
        let q_static = static_deflection(&system, &mean_force)?;
        PlatformState {
            t: 0.0,
            q: q_static + harmonic_init.q,
            qdot: harmonic_init.qdot,
        }
    } else {
        PlatformState::zero()
    };

    let trajectory = integrate_bounded(
        &system,
        initial,
        &forcing,
        cfg.sim.duration_s,
        cfg.sim.dt_s,
        cfg.sim.divergence_bound,
    )?;
    let series = project_to_receiver(&trajectory, cfg.link.range_m, cfg.sim.projection)?;
    let stats = pointing::stats(&series.samples)?;
    let dominance_ratio = angular_dominance_ratio(&trajectory, cfg.link.range_m);

    let omega = natural_frequencies(&system).map_err(|e| CliError::Data(e.to_string()))?;
    let mut report = String::new();
    writeln!(report, "simulation report").unwrap();
    writeln!(report, "seed: {seed}").unwrap();
    writeln!(
        report,
        "duration: {} s at dt = {} s ({} states)",
        cfg.sim.duration_s,
        cfg.sim.dt_s,
        trajectory.len()
    )
    .unwrap();
    writeln!(report, "projection: {}", cfg.sim.projection.name()).unwrap();
    writeln!(report, "link range: {} m", cfg.link.range_m).unwrap();
    for line in &forcing_lines {
        writeln!(report, "{line}").unwrap();
    }
    let freqs = omega
        .iter()
        .map(|w| format!("{w:.3}"))
        .collect::<Vec<_>>()
        .join(" ");
    writeln!(report, "natural frequencies (rad/s): {freqs}").unwrap();
    writeln!(
        report,
        "angular/linear lateral dominance ratio: {dominance_ratio:.2}"
    )
    .unwrap();
    writeln!(report).unwrap();
    report.push_str(&report::stats_table(&stats));

    Ok(SimulationRun {
        trajectory,
        pointing: series,
        stats,
        dominance_ratio,
        report,
    })
}

/// `simulate`: deterministic trajectory + pointing CSVs and a stats report.
pub fn cmd_simulate(cfg: &RunConfig, out_dir: &Path) -> Result<SimulationRun, CliError> {
    let run = run_simulation(cfg)?;
    let sig = cfg.output.csv_sig_digits;
    csvio::write_file(
        &out_dir.join("trajectory.csv"),
        &csvio::trajectory_csv(&run.trajectory, sig),
    )?;
    csvio::write_file(
        &out_dir.join("pointing.csv"),
        &csvio::pointing_csv(&run.pointing.samples, sig),
    )?;
    csvio::write_file(&out_dir.join("stats.txt"), &run.report)?;
    Ok(run)
}

pub struct TrackArgs {
    pub frames_dir: PathBuf,
    pub fps: f64,
    pub threshold: u8,
    pub distance_m: f64,
    pub calibration: CalibrationSource,
    pub boresight: Boresight,
}

pub enum CalibrationSource {
    /// Reference frame path plus the footprint's physical diameter.
    ReferenceFrame(PathBuf, f64),
    MetersPerPixel(f64),
}

pub struct TrackRun {
    pub calibration: Calibration,
    pub pointing: fsojitter::pointing::PointingSeries,
    pub stats: StatsSummary,
    pub gaps: Vec<usize>,
    pub report: String,
}

/// `track`: centroid a frame directory into a pointing CSV + stats report.
pub fn cmd_track(args: &TrackArgs, out_dir: &Path) -> Result<TrackRun, CliError> {
    let calibration = match &args.calibration {
        CalibrationSource::MetersPerPixel(scale) => {
            Calibration::from_scale(*scale).map_err(CliError::from)?
        }
        CalibrationSource::ReferenceFrame(path, diameter_m) => {
            let (w, h, pixels) = tracker::read_pgm(path)?;
            let frame = tracker::Frame::new(w, h, pixels, 0, args.fps)?;
            calibrate(&frame, args.threshold, *diameter_m)?
        }
    };
    let frames = load_frames(&args.frames_dir, args.fps)?;
    if frames.is_empty() {
        return Err(CliError::usage(format!(
            "no .pgm frames found in {}",
            args.frames_dir.display()
        )));
    }
    let displacements = extract_series(&frames, &calibration, args.threshold, args.boresight)?;
    let series = displacement_to_pointing(&displacements, args.distance_m)?;
    let stats = pointing::stats(&series.samples)?;

    let mut report = String::new();
    writeln!(report, "tracking report").unwrap();
    writeln!(
        report,
        "frames: {} ({} detected, {} gaps) at {} fps",
        frames.len(),
        series.samples.len(),
        displacements.gaps.len(),
        args.fps
    )
    .unwrap();
    writeln!(
        report,
        "calibration: {:.6e} m/px (reference diameter {:.3} px)",
        calibration.meters_per_pixel, calibration.ref_diameter_px
    )
    .unwrap();
    writeln!(report, "distance: {} m", args.distance_m).unwrap();
    writeln!(report).unwrap();
    report.push_str(&report::stats_table(&stats));

    csvio::write_file(
        &out_dir.join("pointing.csv"),
        &csvio::pointing_csv(&series.samples, 9),
    )?;
    csvio::write_file(&out_dir.join("stats.txt"), &report)?;
    Ok(TrackRun {
        calibration,
        pointing: series,
        stats,
        gaps: displacements.gaps,
        report,
    })
}

/// `stats`: summary statistics of an existing pointing CSV.
pub fn cmd_stats(input: &Path, out_dir: Option<&Path>) -> Result<(StatsSummary, String), CliError> {
    let samples = csvio::read_pointing_csv(input)?;
    let stats = pointing::stats(&samples)?;
    let text = report::stats_table(&stats);
    if let Some(dir) = out_dir {
        csvio::write_file(&dir.join("stats.txt"), &text)?;
    }
    Ok((stats, text))
}

pub struct LinkBudgetArgs {
    pub geometry: LinkGeometry,
    pub sigma_mrad: Option<f64>,
    pub mc_samples: usize,
    pub seed: u64,
    pub curve: Option<(f64, f64, usize)>,
}

pub struct LinkBudgetRun {
    pub rows: Vec<[f64; 4]>,
    pub report: String,
    pub csv: String,
}

/// `linkbudget`: point budget and optional range sweep.
pub fn cmd_linkbudget(args: &LinkBudgetArgs, out_dir: Option<&Path>) -> Result<LinkBudgetRun, CliError> {
    let budget_row = |geometry: &LinkGeometry| -> Result<[f64; 4], CliError> {
        let geo_db = geometric_loss_db(geometry);
        let expected_db = match args.sigma_mrad {
            Some(sigma) => {
                expected_pointing_loss_db(geometry, sigma, args.mc_samples, args.seed)?.loss_db
            }
            None => pointing_loss_db(geometry, 0.0),
        };
        Ok([geometry.range_m, geo_db, expected_db, geo_db + expected_db])
    };

    let mut rows = Vec::new();
    match args.curve {
        Some((start, end, points)) => {
            for (range, _) in geometric_loss_curve(
                args.geometry.aperture_m,
                args.geometry.divergence_rad,
                start,
                end,
                points,
            )? {
                let g = LinkGeometry {
                    range_m: range,
                    ..args.geometry
                };
                rows.push(budget_row(&g)?);
            }
        }
        None => rows.push(budget_row(&args.geometry)?),
    }

    let mut report = String::new();
    writeln!(report, "link budget").unwrap();
    writeln!(
        report,
        "aperture: {} m, divergence: {} rad",
        args.geometry.aperture_m, args.geometry.divergence_rad
    )
    .unwrap();
    if !args.geometry.far_field() {
        writeln!(
            report,
            "warning: footprint ({:.3} m) is smaller than the aperture; far-field loss formulas are nominal",
            args.geometry.footprint_m()
        )
        .unwrap();
    }
    match args.sigma_mrad {
        Some(sigma) => writeln!(
            report,
            "pointing jitter: Rayleigh sigma = {sigma} mrad ({} Monte Carlo samples, seed {})",
            args.mc_samples, args.seed
        )
        .unwrap(),
        None => writeln!(report, "pointing jitter: none (boresight only)").unwrap(),
    }
    for row in &rows {
        writeln!(
            report,
            "L = {:>12.1} m: geometric {:>9.3} dB, pointing {:>9.3} dB, total {:>9.3} dB",
            row[0], row[1], row[2], row[3]
        )
        .unwrap();
    }
    if let Some(tx_dbm) = args.geometry.transmit_power_dbm {
        let total = rows[0][3];
        writeln!(
            report,
            "received power at L = {} m: {:.3} dBm (tx {tx_dbm} dBm)",
            rows[0][0],
            tx_dbm + total
        )
        .unwrap();
    }

    let csv = csvio::budget_csv(&rows, 9);
    if let Some(dir) = out_dir {
        csvio::write_file(&dir.join("budget.csv"), &csv)?;
    }
    Ok(LinkBudgetRun { rows, report, csv })
}

/// `compare`: measured vs predicted pointing CSVs, mirroring the
/// prediction-error table.
pub fn cmd_compare(
    measured: &Path,
    predicted: &Path,
    out_dir: Option<&Path>,
) -> Result<ComparisonReport, CliError> {
    let measured_samples = csvio::read_pointing_csv(measured)?;
    let predicted_samples = csvio::read_pointing_csv(predicted)?;
    let report = ComparisonReport::new(
        pointing::stats(&measured_samples)?,
        pointing::stats(&predicted_samples)?,
    )?;
    if let Some(dir) = out_dir {
        csvio::write_file(&dir.join("comparison.txt"), &report.text())?;
        csvio::write_file(&dir.join("comparison.csv"), &report.csv())?;
    }
    Ok(report)
}
