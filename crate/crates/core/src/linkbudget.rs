//! Link-budget attenuation figures: power ratios, geometric loss from beam
//! divergence, and misalignment (pointing) loss under a flat-top beam model.
//!
//! The beam footprint at the receiver is a uniform-intensity disc of
//! diameter θ·L (small-angle divergence over the link range); pointing loss
//! is the exact circle-circle overlap between that footprint and the
//! receiver aperture, relative to the fully illuminated aperture.

use std::f64::consts::PI;

use thiserror::Error;

use crate::rng::SimRng;

/// Loss reported for disjoint footprint/aperture instead of −∞, dB.
pub const DEFAULT_LOSS_FLOOR_DB: f64 = -100.0;

#[derive(Debug, Error, PartialEq)]
pub enum LinkBudgetError {
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

/// Link geometry: range L, full divergence angle θ, receiver aperture
/// diameter d_R, and optionally the transmit power for absolute budgets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkGeometry {
    pub range_m: f64,
    pub divergence_rad: f64,
    pub aperture_m: f64,
    pub transmit_power_dbm: Option<f64>,
}

impl LinkGeometry {
    pub fn new(
        range_m: f64,
        divergence_rad: f64,
        aperture_m: f64,
    ) -> Result<Self, LinkBudgetError> {
        let checks = [
            ("range_m", range_m),
            ("divergence_rad", divergence_rad),
            ("aperture_m", aperture_m),
        ];
        for (name, value) in checks {
            if !(value > 0.0) {
                return Err(LinkBudgetError::InvalidParameter { name, value });
            }
        }
        Ok(Self {
            range_m,
            divergence_rad,
            aperture_m,
            transmit_power_dbm: None,
        })
    }

    pub fn with_transmit_power_dbm(mut self, dbm: f64) -> Self {
        self.transmit_power_dbm = Some(dbm);
        self
    }

    /// Beam footprint diameter θ·L at the receiver, m.
    pub fn footprint_m(&self) -> f64 {
        self.divergence_rad * self.range_m
    }

    /// True when the footprint covers the aperture (θ·L ≥ d_R), the regime
    /// where the far-field loss formulas are meaningful. Callers should warn
    /// (not fail) otherwise.
    pub fn far_field(&self) -> bool {
        self.footprint_m() >= self.aperture_m
    }
}

/// Power ratio in dB: 10·log10(received / transmitted). Negative for any
/// passive link.
pub fn attenuation_db(received_power: f64, transmitted_power: f64) -> Result<f64, LinkBudgetError> {
    if !(received_power > 0.0) {
        return Err(LinkBudgetError::InvalidParameter {
            name: "received_power",
            value: received_power,
        });
    }
    if !(transmitted_power > 0.0) {
        return Err(LinkBudgetError::InvalidParameter {
            name: "transmitted_power",
            value: transmitted_power,
        });
    }
    Ok(10.0 * (received_power / transmitted_power).log10())
}

/// Geometric (beam-spreading) loss 10·log10(d_R² / (θL)²).
pub fn geometric_loss_db(g: &LinkGeometry) -> f64 {
    20.0 * (g.aperture_m / g.footprint_m()).log10()
}

/// Exact area of the intersection of two discs with radii `r1`, `r2` whose
/// centers are `d` apart.
pub fn circle_overlap_area(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    let r_min = r1.min(r2);
    if d <= (r1 - r2).abs() {
        return PI * r_min * r_min;
    }
    // Lens formula: two circular segments.
    let cos1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let cos2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let part1 = r1 * r1 * cos1.acos();
    let part2 = r2 * r2 * cos2.acos();
    let under = (r1 + r2 - d) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    part1 + part2 - 0.5 * under.max(0.0).sqrt()
}

/// Misalignment loss at a given beam-center offset, with the default floor.
pub fn pointing_loss_db(g: &LinkGeometry, offset_r_m: f64) -> f64 {
    pointing_loss_db_floored(g, offset_r_m, DEFAULT_LOSS_FLOOR_DB)
}

/// Misalignment loss 10·log10(overlap / aperture area) for a flat-top beam
/// footprint offset by `offset_r_m` from the aperture center, floored at
/// `floor_db` when the discs are disjoint.
pub fn pointing_loss_db_floored(g: &LinkGeometry, offset_r_m: f64, floor_db: f64) -> f64 {
    let aperture_radius = g.aperture_m / 2.0;
    let footprint_radius = g.footprint_m() / 2.0;
    let overlap = circle_overlap_area(aperture_radius, footprint_radius, offset_r_m.abs());
    let fraction = overlap / (PI * aperture_radius * aperture_radius);
    if fraction <= 0.0 {
        floor_db
    } else {
        (10.0 * fraction.log10()).max(floor_db)
    }
}

/// Monte Carlo estimate of the misalignment loss averaged over Rayleigh
/// pointing jitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedPointingLoss {
    /// 10·log10 of the mean linear overlap fraction.
    pub loss_db: f64,
    /// Standard error of the estimate, propagated to dB.
    pub standard_error_db: f64,
    pub n_samples: usize,
}

/// Expected misalignment loss when the angular error magnitude is
/// Rayleigh(σ) distributed: offsets r = ρ·L are sampled, the linear overlap
/// fractions averaged, and the mean converted to dB. Seeded and
/// reproducible.
pub fn expected_pointing_loss_db(
    g: &LinkGeometry,
    rayleigh_sigma_mrad: f64,
    n_samples: usize,
    seed: u64,
) -> Result<ExpectedPointingLoss, LinkBudgetError> {
    if !(rayleigh_sigma_mrad > 0.0) {
        return Err(LinkBudgetError::InvalidParameter {
            name: "rayleigh_sigma_mrad",
            value: rayleigh_sigma_mrad,
        });
    }
    if n_samples < 1_000 {
        return Err(LinkBudgetError::InvalidParameter {
            name: "n_samples",
            value: n_samples as f64,
        });
    }
    let aperture_radius = g.aperture_m / 2.0;
    let footprint_radius = g.footprint_m() / 2.0;
    let aperture_area = PI * aperture_radius * aperture_radius;
    let mut rng = SimRng::new(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let rho_rad = rng.rayleigh(rayleigh_sigma_mrad) * 1e-3;
        let offset = rho_rad * g.range_m;
        let fraction =
            circle_overlap_area(aperture_radius, footprint_radius, offset) / aperture_area;
        sum += fraction;
        sum_sq += fraction * fraction;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    let se = (var / n).sqrt();
    let loss_db = if mean > 0.0 {
        (10.0 * mean.log10()).max(DEFAULT_LOSS_FLOOR_DB)
    } else {
        DEFAULT_LOSS_FLOOR_DB
    };
    let standard_error_db = if mean > 0.0 {
        10.0 / std::f64::consts::LN_10 * se / mean
    } else {
        0.0
    };
    Ok(ExpectedPointingLoss {
        loss_db,
        standard_error_db,
        n_samples,
    })
}

/// Geometric loss sampled at log-spaced ranges, endpoints exact.
pub fn geometric_loss_curve(
    aperture_m: f64,
    divergence_rad: f64,
    l_start_m: f64,
    l_end_m: f64,
    n_points: usize,
) -> Result<Vec<(f64, f64)>, LinkBudgetError> {
    if !(l_start_m > 0.0) || l_start_m >= l_end_m {
        return Err(LinkBudgetError::InvalidParameter {
            name: "l_start_m",
            value: l_start_m,
        });
    }
    if n_points < 2 {
        return Err(LinkBudgetError::InvalidParameter {
            name: "n_points",
            value: n_points as f64,
        });
    }
    let log_start = l_start_m.ln();
    let log_step = (l_end_m.ln() - log_start) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            let range = if i == 0 {
                l_start_m
            } else if i == n_points - 1 {
                l_end_m
            } else {
                (log_start + i as f64 * log_step).exp()
            };
            let g = LinkGeometry {
                range_m: range,
                divergence_rad,
                aperture_m,
                transmit_power_dbm: None,
            };
            (range, geometric_loss_db(&g))
        })
        .collect())
}
