//! Deterministic CSV schemas.
//!
//! Numbers are written in scientific notation at a fixed number of
//! significant digits (default 9), so outputs are byte-stable and parse
//! losslessly in any language.
//!
//! - pointing:   `t_s,theta_x_mrad,theta_y_mrad,rho_mrad,lateral_x_m,lateral_y_m`
//! - trajectory: `t_s,x_m,y_m,z_m,roll_rad,pitch_rad,yaw_rad` + velocity columns
//! - budget:     `L_m,geometric_db,expected_pointing_db,total_db`

use std::fmt::Write as _;
use std::path::Path;

use fsojitter::dynamics::Trajectory;
use fsojitter::pointing::PointingSample;

use crate::error::CliError;

pub const POINTING_HEADER: [&str; 6] = [
    "t_s",
    "theta_x_mrad",
    "theta_y_mrad",
    "rho_mrad",
    "lateral_x_m",
    "lateral_y_m",
];

pub const TRAJECTORY_HEADER: [&str; 13] = [
    "t_s",
    "x_m",
    "y_m",
    "z_m",
    "roll_rad",
    "pitch_rad",
    "yaw_rad",
    "vx_mps",
    "vy_mps",
    "vz_mps",
    "vroll_radps",
    "vpitch_radps",
    "vyaw_radps",
];

pub const BUDGET_HEADER: [&str; 4] = ["L_m", "geometric_db", "expected_pointing_db", "total_db"];

/// `x` at `sig` significant digits, e.g. `fmt_sig(-48.636, 9)` →
/// `-4.86359591e1`.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    format!("{:.*e}", sig.saturating_sub(1), x)
}

fn write_rows<I>(header: &[&str], rows: I, sig: usize) -> String
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for value in row {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{}", fmt_sig(value, sig)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn pointing_csv(samples: &[PointingSample], sig: usize) -> String {
    write_rows(
        &POINTING_HEADER,
        samples.iter().map(|s| {
            vec![
                s.t_s,
                s.theta_x_mrad,
                s.theta_y_mrad,
                s.rho_mrad,
                s.lateral_x_m,
                s.lateral_y_m,
            ]
        }),
        sig,
    )
}

pub fn trajectory_csv(traj: &Trajectory, sig: usize) -> String {
    write_rows(
        &TRAJECTORY_HEADER,
        traj.states.iter().map(|s| {
            let mut row = Vec::with_capacity(13);
            row.push(s.t);
            row.extend(s.q.iter().copied());
            row.extend(s.qdot.iter().copied());
            row
        }),
        sig,
    )
}

pub fn budget_csv(rows: &[[f64; 4]], sig: usize) -> String {
    write_rows(&BUDGET_HEADER, rows.iter().map(|r| r.to_vec()), sig)
}

/// Parses a pointing CSV, naming any missing column or malformed cell.
pub fn parse_pointing_csv(text: &str, source: &str) -> Result<Vec<PointingSample>, CliError> {
    let mut lines = text.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{source}: file is empty")))?;
    let columns: Vec<&str> = header_line.trim().split(',').collect();
    let mut index_of = [0_usize; 6];
    for (slot, name) in index_of.iter_mut().zip(POINTING_HEADER) {
        *slot = columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| CliError::Data(format!("{source}: missing column {name:?}")))?;
    }
    let mut samples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(CliError::Data(format!(
                "{source}: line {} has {} cells, expected {}",
                lineno + 2,
                cells.len(),
                columns.len()
            )));
        }
        let mut values = [0.0_f64; 6];
        for (value, &idx) in values.iter_mut().zip(&index_of) {
            *value = cells[idx].trim().parse::<f64>().map_err(|_| {
                CliError::Data(format!(
                    "{source}: line {}: cannot parse {:?} as a number",
                    lineno + 2,
                    cells[idx]
                ))
            })?;
        }
        samples.push(PointingSample {
            t_s: values[0],
            theta_x_mrad: values[1],
            theta_y_mrad: values[2],
            rho_mrad: values[3],
            lateral_x_m: values[4],
            lateral_y_m: values[5],
        });
    }
    Ok(samples)
}

pub fn read_pointing_csv(path: &Path) -> Result<Vec<PointingSample>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_pointing_csv(&text, &path.display().to_string())
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Data(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digit_formatting() {
        assert_eq!(fmt_sig(2.8749, 9), "2.87490000e0");
        assert_eq!(fmt_sig(-48.6359591, 9), "-4.86359591e1");
        assert_eq!(fmt_sig(0.0, 9), "0.00000000e0");
        assert_eq!(fmt_sig(1.0 / 30.0, 5), "3.3333e-2");
    }

    #[test]
    fn pointing_round_trip_preserves_values() {
        let samples: Vec<PointingSample> = (0..20)
            .map(|i| PointingSample {
                t_s: i as f64 / 30.0,
                theta_x_mrad: (i as f64).sin() * 3.0,
                theta_y_mrad: (i as f64).cos() * 1.5,
                rho_mrad: 2.0 + i as f64 * 0.1,
                lateral_x_m: i as f64 * 1e-4,
                lateral_y_m: -(i as f64) * 2e-4,
            })
            .collect();
        let csv = pointing_csv(&samples, 12);
        let parsed = parse_pointing_csv(&csv, "test").unwrap();
        assert_eq!(parsed.len(), samples.len());
        for (a, b) in parsed.iter().zip(&samples) {
            assert!((a.theta_x_mrad - b.theta_x_mrad).abs() < 1e-9);
            assert!((a.rho_mrad - b.rho_mrad).abs() < 1e-9);
        }
    }

    #[test]
    fn missing_column_is_named() {
        let err =
            parse_pointing_csv("t_s,theta_x_mrad,rho_mrad\n0,1,2\n", "input.csv").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("theta_y_mrad"), "{msg}");
        assert!(msg.contains("input.csv"), "{msg}");
    }

    #[test]
    fn malformed_cell_is_located() {
        let csv = "t_s,theta_x_mrad,theta_y_mrad,rho_mrad,lateral_x_m,lateral_y_m\n0,1,x,3,4,5\n";
        let err = parse_pointing_csv(csv, "input.csv").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn empty_file_is_a_data_error() {
        assert!(parse_pointing_csv("", "input.csv").is_err());
    }
}
