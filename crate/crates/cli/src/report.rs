//! Human-readable reports: pointing statistics tables and
//! measured-vs-predicted comparisons.

use std::fmt::Write as _;

use fsojitter::pointing::{self, StatsSummary};

use crate::error::CliError;

/// Statistics table, 4 decimal places, mrad.
pub fn stats_table(s: &StatsSummary) -> String {
    let mut out = String::new();
    writeln!(out, "pointing statistics (mrad), n = {}", s.n).unwrap();
    writeln!(out, "{:<14}{:>12}{:>12}", "", "mean", "std").unwrap();
    writeln!(
        out,
        "{:<14}{:>12.4}{:>12.4}",
        "theta_x", s.mu_theta_x, s.sigma_theta_x
    )
    .unwrap();
    writeln!(
        out,
        "{:<14}{:>12.4}{:>12.4}",
        "theta_y", s.mu_theta_y, s.sigma_theta_y
    )
    .unwrap();
    writeln!(out, "{:<14}{:>12.4}{:>12.4}", "rho", s.mu_rho, s.sigma_rho).unwrap();
    out
}

/// Measured vs predicted statistics plus the relative prediction error on
/// the magnitude mean.
#[derive(Clone, Copy, Debug)]
pub struct ComparisonReport {
    pub measured: StatsSummary,
    pub predicted: StatsSummary,
    pub prediction_error_percent: f64,
}

impl ComparisonReport {
    pub fn new(measured: StatsSummary, predicted: StatsSummary) -> Result<Self, CliError> {
        let prediction_error_percent =
            pointing::prediction_error(measured.mu_rho, predicted.mu_rho)?;
        Ok(Self {
            measured,
            predicted,
            prediction_error_percent,
        })
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "comparison of measured (n = {}) vs predicted (n = {}) pointing statistics (mrad)",
            self.measured.n, self.predicted.n
        )
        .unwrap();
        writeln!(
            out,
            "{:<14}{:>12}{:>12}{:>12}",
            "", "measured", "predicted", "delta"
        )
        .unwrap();
        let rows = [
            ("mu_theta_x", self.measured.mu_theta_x, self.predicted.mu_theta_x),
            ("mu_theta_y", self.measured.mu_theta_y, self.predicted.mu_theta_y),
            ("mu_rho", self.measured.mu_rho, self.predicted.mu_rho),
            (
                "sigma_theta_x",
                self.measured.sigma_theta_x,
                self.predicted.sigma_theta_x,
            ),
            (
                "sigma_theta_y",
                self.measured.sigma_theta_y,
                self.predicted.sigma_theta_y,
            ),
            ("sigma_rho", self.measured.sigma_rho, self.predicted.sigma_rho),
        ];
        for (name, m, p) in rows {
            writeln!(out, "{:<14}{:>12.4}{:>12.4}{:>12.4}", name, m, p, p - m).unwrap();
        }
        writeln!(
            out,
            "prediction error on mu_rho: {:.2}%",
            self.prediction_error_percent
        )
        .unwrap();
        out
    }

    /// One-row CSV mirroring the text report.
    pub fn csv(&self) -> String {
        let mut out = String::from(
            "quantity,measured,predicted,delta\n",
        );
        let rows = [
            ("mu_theta_x", self.measured.mu_theta_x, self.predicted.mu_theta_x),
            ("mu_theta_y", self.measured.mu_theta_y, self.predicted.mu_theta_y),
            ("mu_rho", self.measured.mu_rho, self.predicted.mu_rho),
            (
                "sigma_theta_x",
                self.measured.sigma_theta_x,
                self.predicted.sigma_theta_x,
            ),
            (
                "sigma_theta_y",
                self.measured.sigma_theta_y,
                self.predicted.sigma_theta_y,
            ),
            ("sigma_rho", self.measured.sigma_rho, self.predicted.sigma_rho),
        ];
        for (name, m, p) in rows {
            writeln!(out, "{name},{m},{p},{}", p - m).unwrap();
        }
        writeln!(
            out,
            "prediction_error_percent,{},,",
            self.prediction_error_percent
        )
        .unwrap();
        out
    }
}
