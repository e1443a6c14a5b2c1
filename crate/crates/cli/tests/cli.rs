//! End-to-end tests of the `fsojitter` binary: flag handling, exit codes,
//! and output formats.
//!
//! Exit code contract: 0 success, 2 usage/config, 3 data, 4 divergence.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fsojitter_cli::fixtures;

fn repo_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsojitter"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

/// Copy of the reference config with `key = value` overrides applied.
fn write_config(dir: &Path, overrides: &str) -> PathBuf {
    let mut lines: Vec<String> = std::fs::read_to_string(repo_path("configs/quadcopter_reference.cfg"))
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    for over in overrides.lines() {
        let key = over.split('=').next().unwrap().trim().to_string();
        match lines
            .iter_mut()
            .find(|l| l.split('=').next().map(str::trim) == Some(key.as_str()))
        {
            Some(line) => *line = over.to_string(),
            None => lines.push(over.to_string()),
        }
    }
    let path = dir.join("run.cfg");
    std::fs::write(&path, lines.join("\n")).unwrap();
    path
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let output = run(&["linkbudget", "--range-m", "10000"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let output = run(&["warp"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn invalid_config_lists_every_bad_field() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.cfg");
    std::fs::write(
        &path,
        "platform.mass_kg = -3\nsim.dt_s = 0\nforcing.wind.scenario = gusty\n",
    )
    .unwrap();
    let output = run(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    for needle in ["platform.mass_kg", "sim.dt_s", "forcing.wind.scenario"] {
        assert!(err.contains(needle), "stderr missing {needle}:\n{err}");
    }
}

#[test]
fn minimal_run_emits_two_trajectory_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sim.duration_s = 0.001\nsim.dt_s = 0.001");
    let out = tmp.path().join("out");
    let output = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3, "header + 2 states");
}

#[test]
fn seed_flag_overrides_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    // Wind makes the output seed-sensitive.
    let cfg = write_config(
        tmp.path(),
        "forcing.wind.enabled = true\nsim.duration_s = 0.5",
    );
    let bytes_for = |seed: &str, dir: &str| {
        let out = tmp.path().join(dir);
        let output = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
        std::fs::read(out.join("pointing.csv")).unwrap()
    };
    let a = bytes_for("1", "a");
    let b = bytes_for("2", "b");
    let a_again = bytes_for("1", "c");
    assert_ne!(a, b, "different seeds must change the series");
    assert_eq!(a, a_again, "same seed must reproduce the series");
}

#[test]
fn unstable_step_exits_with_divergence_code() {
    let tmp = tempfile::tempdir().unwrap();
    // dt far beyond the rotational mode's stability limit.
    let cfg = write_config(tmp.path(), "sim.dt_s = 0.05\nsim.duration_s = 5");
    let out = tmp.path().join("out");
    let output = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(4), "{}", stderr(&output));
    assert!(stderr(&output).contains("diverge"), "{}", stderr(&output));
}

#[test]
fn track_on_the_shipped_fixture_reproduces_the_spreads() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = run(&[
        "track",
        "--frames",
        repo_path("fixtures/frames").to_str().unwrap(),
        "--fps",
        "30",
        "--threshold",
        "40",
        "--distance-m",
        "10",
        "--ref-frame",
        repo_path("fixtures/reference.pgm").to_str().unwrap(),
        "--ref-diameter-m",
        "0.196",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("n = 150"), "{text}");
    let csv = std::fs::read_to_string(out.join("pointing.csv")).unwrap();
    let samples = fsojitter_cli::csvio::parse_pointing_csv(&csv, "pointing.csv").unwrap();
    let stats = fsojitter::pointing::stats(&samples).unwrap();
    assert!((stats.sigma_theta_x - 3.2768).abs() < 0.05);
    assert!((stats.sigma_theta_y - 1.5535).abs() < 0.05);
    let last_t = samples.last().unwrap().t_s;
    assert!((last_t - 4.9667).abs() < 5e-4, "t ends at {last_t}");
}

#[test]
fn track_requires_a_calibration_source() {
    let output = run(&[
        "track",
        "--frames",
        repo_path("fixtures/frames").to_str().unwrap(),
        "--fps",
        "30",
        "--distance-m",
        "10",
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("calibration"));
}

#[test]
fn track_on_an_empty_directory_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let output = run(&[
        "track",
        "--frames",
        tmp.path().to_str().unwrap(),
        "--fps",
        "30",
        "--distance-m",
        "10",
        "--meters-per-pixel",
        "0.004",
    ]);
    assert_eq!(output.status.code(), Some(2), "{}", stderr(&output));
    assert!(stderr(&output).contains("no .pgm frames"));
}

#[test]
fn all_black_frames_are_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    std::fs::create_dir_all(&frames).unwrap();
    for i in 0..5 {
        fsojitter::tracker::write_pgm(
            &frames.join(format!("f{i}.pgm")),
            32,
            32,
            &vec![0_u8; 32 * 32],
        )
        .unwrap();
    }
    let output = run(&[
        "track",
        "--frames",
        frames.to_str().unwrap(),
        "--fps",
        "30",
        "--distance-m",
        "10",
        "--meters-per-pixel",
        "0.004",
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(3), "{}", stderr(&output));
    assert!(stderr(&output).contains("insufficient data"));
}

#[test]
fn corrupt_frame_is_named_in_the_error() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    std::fs::create_dir_all(&frames).unwrap();
    std::fs::write(frames.join("broken.pgm"), b"not a graymap").unwrap();
    let output = run(&[
        "track",
        "--frames",
        frames.to_str().unwrap(),
        "--fps",
        "30",
        "--distance-m",
        "10",
        "--meters-per-pixel",
        "0.004",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("broken.pgm"), "{}", stderr(&output));
}

#[test]
fn stats_subcommand_prints_the_fixture_table() {
    let output = run(&[
        "stats",
        "--input",
        repo_path("fixtures/measured_pointing.csv").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("12.9700"), "{text}");
    assert!(text.contains("2.8749"), "{text}");
}

#[test]
fn stats_on_a_headerless_file_names_the_missing_column() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.csv");
    std::fs::write(&path, "a,b\n1,2\n").unwrap();
    let output = run(&["stats", "--input", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("t_s"), "{}", stderr(&output));
}

#[test]
fn stats_on_an_empty_series_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("empty.csv");
    std::fs::write(
        &path,
        "t_s,theta_x_mrad,theta_y_mrad,rho_mrad,lateral_x_m,lateral_y_m\n",
    )
    .unwrap();
    let output = run(&["stats", "--input", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("insufficient data"));
}

#[test]
fn linkbudget_point_budget_matches_the_reference_aperture() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = run(&[
        "linkbudget",
        "--range-m",
        "10000",
        "--divergence-rad",
        "0.001",
        "--aperture-m",
        "0.037",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let csv = std::fs::read_to_string(out.join("budget.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "L_m,geometric_db,expected_pointing_db,total_db"
    );
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert!((row[1] + 48.64).abs() < 0.01, "geometric_db {}", row[1]);
    assert_eq!(row[2], 0.0, "no jitter requested");
}

#[test]
fn linkbudget_curve_spans_exactly_twenty_db_per_decade() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = run(&[
        "linkbudget",
        "--range-m",
        "10000",
        "--divergence-rad",
        "0.001",
        "--aperture-m",
        "0.037",
        "--sigma-mrad",
        "6.3",
        "--mc-samples",
        "20000",
        "--curve-start-m",
        "10000",
        "--curve-end-m",
        "100000",
        "--curve-points",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let csv = std::fs::read_to_string(out.join("budget.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 10);
    let first = &rows[0];
    let last = &rows[9];
    assert!((first[1] - last[1] - 20.0).abs() < 1e-9);
    // Jitter never helps at longer range.
    assert!(last[2] <= first[2] + 0.2, "{} vs {}", last[2], first[2]);
}

#[test]
fn compare_matches_the_reference_prediction_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = run(&[
        "compare",
        "--measured",
        repo_path("fixtures/measured_pointing.csv").to_str().unwrap(),
        "--predicted",
        repo_path("fixtures/predicted_pointing.csv").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("11.33%"));
    let csv = std::fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert!(csv.contains("prediction_error_percent,11.33"), "{csv}");
}

#[test]
fn compare_with_itself_is_zero_error() {
    let measured = repo_path("fixtures/measured_pointing.csv");
    let output = run(&[
        "compare",
        "--measured",
        measured.to_str().unwrap(),
        "--predicted",
        measured.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("0.00%"), "{}", stdout(&output));
}

#[test]
fn compare_names_a_missing_column() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("schema.csv");
    std::fs::write(&path, "t_s,theta_x_mrad,rho_mrad,lateral_x_m,lateral_y_m\n").unwrap();
    let output = run(&[
        "compare",
        "--measured",
        path.to_str().unwrap(),
        "--predicted",
        repo_path("fixtures/predicted_pointing.csv").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(
        stderr(&output).contains("theta_y_mrad"),
        "{}",
        stderr(&output)
    );
}

#[test]
fn simulate_report_mentions_the_dominance_ratio() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = run(&[
        "simulate",
        "--config",
        repo_path("configs/quadcopter_reference.cfg").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = std::fs::read_to_string(out.join("stats.txt")).unwrap();
    assert!(report.contains("dominance ratio"), "{report}");
    assert!(report.contains("seed: 7"), "{report}");
}

#[test]
fn balloon_wind_configs_parse_and_run() {
    let tmp = tempfile::tempdir().unwrap();
    for name in [
        "balloon_wind_calm.cfg",
        "balloon_wind_typical.cfg",
        "balloon_wind_turbulent.cfg",
        "balloon_wind_unidirectional_z.cfg",
    ] {
        let out = tmp.path().join(name);
        let output = run(&[
            "simulate",
            "--config",
            repo_path(&format!("configs/{name}")).to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0), "{name}: {}", stderr(&output));
    }
}

#[test]
fn fixture_constants_agree_with_the_shipped_reference_frame() {
    // Guard against the constants drifting away from the committed files.
    let (w, h, _) = fsojitter::tracker::read_pgm(&repo_path("fixtures/reference.pgm")).unwrap();
    assert_eq!((w, h), (fixtures::FRAME_WIDTH, fixtures::FRAME_HEIGHT));
    assert!((fixtures::REF_DIAMETER_M / 49.0 - fixtures::METERS_PER_PIXEL).abs() < 1e-15);
}
