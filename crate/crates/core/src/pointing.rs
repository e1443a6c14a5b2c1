//! Receiver-plane pointing errors: projection of platform trajectories,
//! summary statistics, and Gaussian / Rayleigh fits.
//!
//! Angles are carried in milliradians throughout; lateral displacements at
//! the receiver are in meters and obey the small-angle contract
//! lateral = θ(rad) × link range.

use thiserror::Error;

use crate::dynamics::{Dof, Trajectory};

#[derive(Debug, Error, PartialEq)]
pub enum PointingError {
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("negative magnitude {value} at sample {index}")]
    NegativeMagnitude { index: usize, value: f64 },
}

/// One pointing observation.
///
/// For series produced by [`project_to_receiver`] (and by the tracker's
/// lateral-to-angular conversion) the magnitude satisfies
/// ρ² = θx² + θy² exactly; series imported from measurement files may carry
/// an independently measured magnitude column instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointingSample {
    pub t_s: f64,
    pub theta_x_mrad: f64,
    pub theta_y_mrad: f64,
    pub rho_mrad: f64,
    pub lateral_x_m: f64,
    pub lateral_y_m: f64,
}

/// Time-ordered pointing observations at one link range.
#[derive(Clone, Debug)]
pub struct PointingSeries {
    pub link_range_m: f64,
    pub samples: Vec<PointingSample>,
}

impl PointingSeries {
    pub fn stats(&self) -> Result<StatsSummary, PointingError> {
        stats(&self.samples)
    }
}

/// Per-component sample means and standard deviations (n−1 denominator).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatsSummary {
    pub mu_theta_x: f64,
    pub mu_theta_y: f64,
    pub mu_rho: f64,
    pub sigma_theta_x: f64,
    pub sigma_theta_y: f64,
    pub sigma_rho: f64,
    pub n: usize,
}

/// Maximum-likelihood Gaussian fit. `degenerate` marks an all-equal sample
/// (zero variance).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianFit {
    pub mean: f64,
    pub std: f64,
    pub degenerate: bool,
}

/// Per-axis Gaussian fits plus the Rayleigh magnitude fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub gaussian_x: GaussianFit,
    pub gaussian_y: GaussianFit,
    pub rayleigh_sigma: f64,
}

/// How platform motion maps to receiver-plane displacement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionMode {
    /// Only the roll/pitch angles deflect the beam (the dominant effect).
    AngularOnly,
    /// Adds the translational displacement perpendicular to the link axis.
    AngularPlusLinear,
}

impl ProjectionMode {
    pub fn name(self) -> &'static str {
        match self {
            ProjectionMode::AngularOnly => "angular-only",
            ProjectionMode::AngularPlusLinear => "angular-plus-linear",
        }
    }
}

impl std::str::FromStr for ProjectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "angular-only" => Ok(ProjectionMode::AngularOnly),
            "angular-plus-linear" => Ok(ProjectionMode::AngularPlusLinear),
            other => Err(format!("unknown projection mode {other:?}")),
        }
    }
}

/// Projects a trajectory onto the receiver plane at the given link range.
///
/// θx is the roll coordinate, θy the pitch coordinate (small-angle). In
/// [`ProjectionMode::AngularPlusLinear`] the x/y translations add to the
/// lateral displacement and the reported angles are backed out as
/// lateral / range, so lateral = θ(rad)·L holds in both modes.
pub fn project_to_receiver(
    traj: &Trajectory,
    link_range_m: f64,
    mode: ProjectionMode,
) -> Result<PointingSeries, PointingError> {
    if !(link_range_m > 0.0) {
        return Err(PointingError::InvalidParameter {
            name: "link_range_m",
            value: link_range_m,
        });
    }
    let samples = traj
        .states
        .iter()
        .map(|state| {
            let roll = state.q[Dof::Roll as usize];
            let pitch = state.q[Dof::Pitch as usize];
            let (lateral_x, lateral_y) = match mode {
                ProjectionMode::AngularOnly => (roll * link_range_m, pitch * link_range_m),
                ProjectionMode::AngularPlusLinear => (
                    roll * link_range_m + state.q[Dof::X as usize],
                    pitch * link_range_m + state.q[Dof::Y as usize],
                ),
            };
            let theta_x_mrad = lateral_x / link_range_m * 1e3;
            let theta_y_mrad = lateral_y / link_range_m * 1e3;
            PointingSample {
                t_s: state.t,
                theta_x_mrad,
                theta_y_mrad,
                rho_mrad: theta_x_mrad.hypot(theta_y_mrad),
                lateral_x_m: lateral_x,
                lateral_y_m: lateral_y,
            }
        })
        .collect();
    Ok(PointingSeries {
        link_range_m,
        samples,
    })
}

/// Ratio of the angular to the linear contribution to receiver lateral
/// displacement: combined std of (L·roll, L·pitch) over combined std of
/// (x, y). Infinite when the platform never translates.
pub fn angular_dominance_ratio(traj: &Trajectory, link_range_m: f64) -> f64 {
    let spread = |dof: Dof| {
        let series: Vec<f64> = traj.dof_series(dof).collect();
        sample_std(&series)
    };
    let angular = link_range_m * spread(Dof::Roll).hypot(spread(Dof::Pitch));
    let linear = spread(Dof::X).hypot(spread(Dof::Y));
    angular / linear
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation with the n−1 denominator. An all-equal sample
/// reports exactly zero rather than accumulated rounding noise.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.windows(2).all(|w| w[0] == w[1]) {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

/// Sample statistics of every column, each treated independently.
pub fn stats(samples: &[PointingSample]) -> Result<StatsSummary, PointingError> {
    if samples.len() < 2 {
        return Err(PointingError::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let column = |f: fn(&PointingSample) -> f64| -> Vec<f64> { samples.iter().map(f).collect() };
    let tx = column(|s| s.theta_x_mrad);
    let ty = column(|s| s.theta_y_mrad);
    let rho = column(|s| s.rho_mrad);
    Ok(StatsSummary {
        mu_theta_x: mean(&tx),
        mu_theta_y: mean(&ty),
        mu_rho: mean(&rho),
        sigma_theta_x: sample_std(&tx),
        sigma_theta_y: sample_std(&ty),
        sigma_rho: sample_std(&rho),
        n: samples.len(),
    })
}

/// Maximum-likelihood Gaussian fit: sample mean and sample std (n−1).
pub fn fit_gaussian(samples: &[f64]) -> Result<GaussianFit, PointingError> {
    if samples.len() < 2 {
        return Err(PointingError::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let std = sample_std(samples);
    Ok(GaussianFit {
        mean: mean(samples),
        std,
        degenerate: std == 0.0,
    })
}

/// Maximum-likelihood Rayleigh scale σ̂ = √(Σ rᵢ² / 2n).
pub fn fit_rayleigh(magnitudes: &[f64]) -> Result<f64, PointingError> {
    if magnitudes.len() < 2 {
        return Err(PointingError::InsufficientData {
            needed: 2,
            got: magnitudes.len(),
        });
    }
    for (index, &value) in magnitudes.iter().enumerate() {
        if value < 0.0 {
            return Err(PointingError::NegativeMagnitude { index, value });
        }
    }
    let sum_sq: f64 = magnitudes.iter().map(|r| r * r).sum();
    Ok((sum_sq / (2.0 * magnitudes.len() as f64)).sqrt())
}

/// Gaussian fits on both axes and a Rayleigh fit on the magnitudes.
pub fn fit_series(samples: &[PointingSample]) -> Result<FitResult, PointingError> {
    let tx: Vec<f64> = samples.iter().map(|s| s.theta_x_mrad).collect();
    let ty: Vec<f64> = samples.iter().map(|s| s.theta_y_mrad).collect();
    let rho: Vec<f64> = samples.iter().map(|s| s.rho_mrad).collect();
    Ok(FitResult {
        gaussian_x: fit_gaussian(&tx)?,
        gaussian_y: fit_gaussian(&ty)?,
        rayleigh_sigma: fit_rayleigh(&rho)?,
    })
}

/// Relative prediction error in percent: 100·|measured − predicted| / measured.
pub fn prediction_error(
    measured_mu_rho: f64,
    predicted_mu_rho: f64,
) -> Result<f64, PointingError> {
    if !(measured_mu_rho > 0.0) {
        return Err(PointingError::InvalidParameter {
            name: "measured_mu_rho",
            value: measured_mu_rho,
        });
    }
    Ok(100.0 * (measured_mu_rho - predicted_mu_rho).abs() / measured_mu_rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_system, integrate, PlatformState};
    use crate::forcing::ZeroForcing;
    use crate::rng::SimRng;
    use nalgebra::Vector6;

    fn sample(tx: f64, ty: f64) -> PointingSample {
        PointingSample {
            t_s: 0.0,
            theta_x_mrad: tx,
            theta_y_mrad: ty,
            rho_mrad: tx.hypot(ty),
            lateral_x_m: 0.0,
            lateral_y_m: 0.0,
        }
    }

    #[test]
    fn zero_trajectory_projects_to_zero_series() {
        let s = build_system(0.7, [0.01, 0.01, 0.02], 1e3, 1e3, 0.002, None).unwrap();
        let traj = integrate(&s, PlatformState::zero(), &ZeroForcing, 0.1, 0.01).unwrap();
        let series = project_to_receiver(&traj, 10.0, ProjectionMode::AngularOnly).unwrap();
        assert!(series
            .samples
            .iter()
            .all(|p| p.theta_x_mrad == 0.0 && p.rho_mrad == 0.0 && p.lateral_x_m == 0.0));
    }

    #[test]
    fn constant_roll_gives_constant_lateral() {
        let s = build_system(0.7, [0.01, 0.01, 0.02], 1e3, 1e3, 0.002, None).unwrap();
        let mut traj = integrate(&s, PlatformState::zero(), &ZeroForcing, 0.1, 0.01).unwrap();
        for state in &mut traj.states {
            state.q[3] = 1e-3; // 1 mrad of roll
        }
        let series = project_to_receiver(&traj, 10.0, ProjectionMode::AngularOnly).unwrap();
        for p in &series.samples {
            assert!((p.lateral_x_m - 0.01).abs() < 1e-12);
            assert!((p.theta_x_mrad - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plus_linear_mode_adds_translation() {
        let s = build_system(0.7, [0.01, 0.01, 0.02], 1e3, 1e3, 0.002, None).unwrap();
        let mut traj = integrate(&s, PlatformState::zero(), &ZeroForcing, 0.1, 0.01).unwrap();
        for state in &mut traj.states {
            state.q[0] = 0.002; // 2 mm of x translation
            state.q[3] = 1e-3;
        }
        let series = project_to_receiver(&traj, 10.0, ProjectionMode::AngularPlusLinear).unwrap();
        for p in &series.samples {
            assert!((p.lateral_x_m - 0.012).abs() < 1e-12);
            // theta backed out as lateral / L
            assert!((p.theta_x_mrad - 1.2).abs() < 1e-12);
            // small-angle contract still holds
            assert!((p.lateral_x_m - p.theta_x_mrad * 1e-3 * 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_positive_range_is_rejected() {
        let s = build_system(0.7, [0.01, 0.01, 0.02], 1e3, 1e3, 0.002, None).unwrap();
        let traj = integrate(&s, PlatformState::zero(), &ZeroForcing, 0.1, 0.01).unwrap();
        assert!(project_to_receiver(&traj, 0.0, ProjectionMode::AngularOnly).is_err());
        assert!(project_to_receiver(&traj, -5.0, ProjectionMode::AngularOnly).is_err());
    }

    #[test]
    fn stats_of_constant_series() {
        let samples = vec![sample(3.0, -1.0); 10];
        let s = stats(&samples).unwrap();
        assert_eq!(s.mu_theta_x, 3.0);
        assert_eq!(s.sigma_theta_x, 0.0);
        assert_eq!(s.n, 10);
    }

    #[test]
    fn stats_two_samples_hand_computed() {
        let samples = vec![sample(0.0, 0.0), sample(2.0, 0.0)];
        let s = stats(&samples).unwrap();
        assert_eq!(s.mu_theta_x, 1.0);
        assert!((s.sigma_theta_x - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stats_needs_two_samples() {
        assert_eq!(
            stats(&[sample(1.0, 1.0)]),
            Err(PointingError::InsufficientData { needed: 2, got: 1 })
        );
    }

    #[test]
    fn gaussian_fit_recovers_generating_parameters() {
        let mut rng = SimRng::new(1234);
        let draws: Vec<f64> = (0..100_000).map(|_| rng.normal(2.87, 3.28)).collect();
        let fit = fit_gaussian(&draws).unwrap();
        assert!((fit.mean - 2.87).abs() / 2.87 < 0.02, "mean {}", fit.mean);
        assert!((fit.std - 3.28).abs() / 3.28 < 0.02, "std {}", fit.std);
        assert!(!fit.degenerate);
    }

    #[test]
    fn gaussian_fit_flags_degenerate_sample() {
        let fit = fit_gaussian(&[4.2; 50]).unwrap();
        assert_eq!(fit.std, 0.0);
        assert!(fit.degenerate);
    }

    #[test]
    fn gaussian_fit_symmetric_sample_has_zero_mean() {
        let fit = fit_gaussian(&[-3.5, 3.5]).unwrap();
        assert_eq!(fit.mean, 0.0);
    }

    #[test]
    fn rayleigh_fit_of_constant_magnitudes() {
        let c = 4.0;
        let sigma = fit_rayleigh(&[c; 100]).unwrap();
        assert!((sigma - c / 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_fit_recovers_component_sigma() {
        let mut rng = SimRng::new(77);
        let mags: Vec<f64> = (0..100_000)
            .map(|_| rng.normal(0.0, 3.0).hypot(rng.normal(0.0, 3.0)))
            .collect();
        let sigma = fit_rayleigh(&mags).unwrap();
        assert!((sigma - 3.0).abs() / 3.0 < 0.02, "sigma {sigma}");
    }

    #[test]
    fn rayleigh_moment_identities_hold_on_fitted_data() {
        let mut rng = SimRng::new(78);
        let mags: Vec<f64> = (0..100_000).map(|_| rng.rayleigh(2.5)).collect();
        let sigma = fit_rayleigh(&mags).unwrap();
        let implied_mean = sigma * (std::f64::consts::PI / 2.0).sqrt();
        let implied_std = sigma * (2.0 - std::f64::consts::PI / 2.0).sqrt();
        assert!((implied_mean - mean(&mags)).abs() / implied_mean < 0.03);
        assert!((implied_std - sample_std(&mags)).abs() / implied_std < 0.03);
    }

    #[test]
    fn rayleigh_fit_rejects_negative_magnitudes() {
        assert!(matches!(
            fit_rayleigh(&[1.0, -0.5, 2.0]),
            Err(PointingError::NegativeMagnitude { index: 1, .. })
        ));
    }

    #[test]
    fn prediction_error_examples() {
        let p = prediction_error(12.97, 11.500).unwrap();
        assert!((p - 100.0 * (12.97 - 11.5) / 12.97).abs() < 1e-12);
        assert!((p - 11.33).abs() < 0.01, "p = {p}");
        assert_eq!(prediction_error(7.0, 7.0).unwrap(), 0.0);
        assert_eq!(prediction_error(10.0, 5.0).unwrap(), 50.0);
        assert!(prediction_error(0.0, 5.0).is_err());
    }

    #[test]
    fn fit_errors_shrink_with_sample_size() {
        let recovery_error = |n: usize| {
            let seeds = [1_u64, 2, 3, 4, 5];
            let mut total = 0.0;
            for seed in seeds {
                let mut rng = SimRng::new(seed);
                let draws: Vec<f64> = (0..n).map(|_| rng.normal(0.0, 3.0)).collect();
                total += (fit_gaussian(&draws).unwrap().std - 3.0).abs();
            }
            total / seeds.len() as f64
        };
        let e3 = recovery_error(1_000);
        let e4 = recovery_error(10_000);
        let e5 = recovery_error(100_000);
        assert!(e3 > e4 && e4 > e5, "errors {e3} {e4} {e5}");
    }

    #[test]
    fn dominance_ratio_of_pure_rotation_is_infinite() {
        let s = build_system(0.7, [0.01, 0.01, 0.02], 1e3, 1e3, 0.002, None).unwrap();
        let mut traj = integrate(&s, PlatformState::zero(), &ZeroForcing, 0.1, 0.01).unwrap();
        for (i, state) in traj.states.iter_mut().enumerate() {
            state.q = Vector6::zeros();
            state.q[3] = 1e-3 * (i as f64).sin();
        }
        assert!(angular_dominance_ratio(&traj, 10.0).is_infinite());
    }
}
