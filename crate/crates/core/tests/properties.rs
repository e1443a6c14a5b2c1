//! Cross-module invariants: linearity of the integrator, energy decay,
//! statistical isometries, and measurement round trips.

use nalgebra::{Vector3, Vector6};
use proptest::prelude::*;

use fsojitter::dynamics::{
    build_system, integrate, natural_frequencies, total_energy, PlatformState, SystemMatrices,
    Trajectory,
};
use fsojitter::forcing::{Forcing, WindForcing, WindParams, WindScenario, ZeroForcing};
use fsojitter::linkbudget::circle_overlap_area;
use fsojitter::pointing::{
    fit_rayleigh, project_to_receiver, stats, PointingSample, ProjectionMode,
};
use fsojitter::rng::SimRng;
use fsojitter::tracker::{
    calibrate, detect_centroid, extract_series, render_disc, render_gaussian_spot, Boresight,
    Calibration, Frame,
};

fn reference_system() -> SystemMatrices {
    build_system(0.7, [0.01, 0.01, 0.02], 1e3, 1e3, 0.002, None).unwrap()
}

fn wind_forcing(seed: u64) -> WindForcing {
    WindForcing::new(WindParams::preset(WindScenario::Typical, seed)).unwrap()
}

fn max_rel_diff(a: &Trajectory, b: &Trajectory, scale_b: f64) -> f64 {
    let norm = b
        .states
        .iter()
        .map(|s| s.q.amax().max(s.qdot.amax()))
        .fold(0.0_f64, f64::max)
        * scale_b.abs();
    let diff = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(sa, sb)| {
            ((sa.q - sb.q * scale_b).amax()).max((sa.qdot - sb.qdot * scale_b).amax())
        })
        .fold(0.0_f64, f64::max);
    diff / norm.max(f64::MIN_POSITIVE)
}

#[test]
fn trajectory_is_linear_in_the_forcing() {
    let system = reference_system();
    let base = wind_forcing(5);
    let factor = 3.25;
    let inner = wind_forcing(5);
    let scaled_forcing = move |t: f64| inner.force(t) * factor;

    let unit = integrate(&system, PlatformState::zero(), &base, 2.0, 1e-3).unwrap();
    let amplified =
        integrate(&system, PlatformState::zero(), &scaled_forcing, 2.0, 1e-3).unwrap();
    assert!(max_rel_diff(&amplified, &unit, factor) < 1e-9);
}

#[test]
fn trajectories_superpose() {
    let system = reference_system();
    let f1 = wind_forcing(11);
    let f2 = wind_forcing(23);
    let f1_inner = wind_forcing(11);
    let f2_inner = wind_forcing(23);
    let sum_forcing = move |t: f64| f1_inner.force(t) + f2_inner.force(t);

    let t1 = integrate(&system, PlatformState::zero(), &f1, 2.0, 1e-3).unwrap();
    let t2 = integrate(&system, PlatformState::zero(), &f2, 2.0, 1e-3).unwrap();
    let t_sum = integrate(&system, PlatformState::zero(), &sum_forcing, 2.0, 1e-3).unwrap();

    let norm = t_sum
        .states
        .iter()
        .map(|s| s.q.amax().max(s.qdot.amax()))
        .fold(0.0_f64, f64::max);
    let diff = t_sum
        .states
        .iter()
        .zip(t1.states.iter().zip(&t2.states))
        .map(|(s, (a, b))| {
            ((s.q - a.q - b.q).amax()).max((s.qdot - a.qdot - b.qdot).amax())
        })
        .fold(0.0_f64, f64::max);
    assert!(diff / norm < 1e-9, "superposition residual {}", diff / norm);
}

#[test]
fn identical_inputs_give_bit_identical_trajectories() {
    let system = reference_system();
    let run = || {
        let forcing = wind_forcing(99);
        integrate(&system, PlatformState::zero(), &forcing, 1.0, 1e-3).unwrap()
    };
    let a = run();
    let b = run();
    for (sa, sb) in a.states.iter().zip(&b.states) {
        for i in 0..6 {
            assert_eq!(sa.q[i].to_bits(), sb.q[i].to_bits());
            assert_eq!(sa.qdot[i].to_bits(), sb.qdot[i].to_bits());
        }
    }
}

#[test]
fn energy_never_increases_without_forcing() {
    let system = reference_system();
    let omega_max = natural_frequencies(&system)
        .unwrap()
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b));
    let dt = 1e-3 * 2.0 * std::f64::consts::PI / omega_max;
    let initial = PlatformState::at_rest(Vector6::new(
        0.05, -0.02, 0.04, 2e-3, -1e-3, 3e-3,
    ));
    let traj = integrate(&system, initial, &ZeroForcing, 2500.0 * dt, dt).unwrap();
    let mut prev = total_energy(&system, &traj.states[0]);
    for state in &traj.states[1..] {
        let e = total_energy(&system, state);
        assert!(
            e <= prev + 1e-8,
            "energy rose from {prev} to {e} at t = {}",
            state.t
        );
        prev = e;
    }
}

#[test]
fn projection_rho_is_consistent_with_components() {
    let system = reference_system();
    let forcing = wind_forcing(7);
    let traj = integrate(&system, PlatformState::zero(), &forcing, 2.0, 1e-3).unwrap();
    for mode in [ProjectionMode::AngularOnly, ProjectionMode::AngularPlusLinear] {
        let series = project_to_receiver(&traj, 10.0, mode).unwrap();
        for p in &series.samples {
            let residual = p.rho_mrad * p.rho_mrad
                - p.theta_x_mrad * p.theta_x_mrad
                - p.theta_y_mrad * p.theta_y_mrad;
            let scale = (p.rho_mrad * p.rho_mrad).max(1e-300);
            assert!(residual.abs() / scale < 1e-9);
        }
    }
}

fn synthetic_samples(seed: u64, n: usize) -> Vec<PointingSample> {
    let mut rng = SimRng::new(seed);
    (0..n)
        .map(|i| {
            let tx = rng.normal(2.0, 1.5);
            let ty = rng.normal(-1.0, 0.8);
            PointingSample {
                t_s: i as f64 / 30.0,
                theta_x_mrad: tx,
                theta_y_mrad: ty,
                rho_mrad: tx.hypot(ty),
                lateral_x_m: tx * 1e-3 * 10.0,
                lateral_y_m: ty * 1e-3 * 10.0,
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn magnitude_statistics_are_rotation_invariant(
        angle in 0.0..std::f64::consts::TAU,
        seed in 0_u64..1000,
    ) {
        let samples = synthetic_samples(seed, 400);
        let rotated: Vec<PointingSample> = samples
            .iter()
            .map(|p| {
                let (s, c) = angle.sin_cos();
                let tx = c * p.theta_x_mrad - s * p.theta_y_mrad;
                let ty = s * p.theta_x_mrad + c * p.theta_y_mrad;
                PointingSample {
                    theta_x_mrad: tx,
                    theta_y_mrad: ty,
                    rho_mrad: tx.hypot(ty),
                    ..*p
                }
            })
            .collect();
        let base = stats(&samples).unwrap();
        let rot = stats(&rotated).unwrap();
        prop_assert!((base.mu_rho - rot.mu_rho).abs() / base.mu_rho < 1e-9);
        prop_assert!((base.sigma_rho - rot.sigma_rho).abs() / base.sigma_rho < 1e-9);
        let mags_base: Vec<f64> = samples.iter().map(|p| p.rho_mrad).collect();
        let mags_rot: Vec<f64> = rotated.iter().map(|p| p.rho_mrad).collect();
        let r_base = fit_rayleigh(&mags_base).unwrap();
        let r_rot = fit_rayleigh(&mags_rot).unwrap();
        prop_assert!((r_base - r_rot).abs() / r_base < 1e-9);
    }

    #[test]
    fn statistics_scale_with_the_samples(
        factor in 0.01_f64..100.0,
        seed in 0_u64..1000,
    ) {
        let samples = synthetic_samples(seed, 300);
        let scaled: Vec<PointingSample> = samples
            .iter()
            .map(|p| PointingSample {
                theta_x_mrad: factor * p.theta_x_mrad,
                theta_y_mrad: factor * p.theta_y_mrad,
                rho_mrad: factor * p.rho_mrad,
                lateral_x_m: factor * p.lateral_x_m,
                lateral_y_m: factor * p.lateral_y_m,
                ..*p
            })
            .collect();
        let base = stats(&samples).unwrap();
        let s = stats(&scaled).unwrap();
        for (a, b) in [
            (s.mu_theta_x, base.mu_theta_x),
            (s.sigma_theta_x, base.sigma_theta_x),
            (s.mu_rho, base.mu_rho),
            (s.sigma_rho, base.sigma_rho),
        ] {
            prop_assert!((a - factor * b).abs() <= 1e-9 * (factor * b).abs().max(1e-12));
        }
        let mags: Vec<f64> = samples.iter().map(|p| p.rho_mrad).collect();
        let mags_scaled: Vec<f64> = scaled.iter().map(|p| p.rho_mrad).collect();
        let r = fit_rayleigh(&mags).unwrap();
        let r_scaled = fit_rayleigh(&mags_scaled).unwrap();
        prop_assert!((r_scaled - factor * r).abs() <= 1e-9 * (factor * r).abs());
    }

    #[test]
    fn overlap_area_is_symmetric_and_bounded(
        r1 in 0.05_f64..4.0,
        r2 in 0.05_f64..4.0,
        d in 0.0_f64..9.0,
    ) {
        let ab = circle_overlap_area(r1, r2, d);
        let ba = circle_overlap_area(r2, r1, d);
        prop_assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
        let bound = std::f64::consts::PI * r1.min(r2) * r1.min(r2);
        prop_assert!(ab >= 0.0 && ab <= bound + 1e-12);
    }
}

#[test]
fn centroid_is_translation_equivariant() {
    let (w, h) = (96, 72);
    let base = render_gaussian_spot(w, h, (30.3, 25.7), 2.5, 255, 0);
    let frame = Frame::new(w, h, base.clone(), 0, 30.0).unwrap();
    let (cx, cy) = detect_centroid(&frame, 40).unwrap();
    for (dx, dy) in [(5_i64, 3_i64), (-4, 7), (11, -6)] {
        let mut shifted = vec![0_u8; w * h];
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let sx = x - dx;
                let sy = y - dy;
                if (0..w as i64).contains(&sx) && (0..h as i64).contains(&sy) {
                    shifted[(y * w as i64 + x) as usize] =
                        base[(sy * w as i64 + sx) as usize];
                }
            }
        }
        let frame = Frame::new(w, h, shifted, 0, 30.0).unwrap();
        let (sx, sy) = detect_centroid(&frame, 40).unwrap();
        assert!((sx - cx - dx as f64).abs() < 1e-6, "dx {dx}: {sx} vs {cx}");
        assert!((sy - cy - dy as f64).abs() < 1e-6, "dy {dy}: {sy} vs {cy}");
    }
}

#[test]
fn render_then_extract_recovers_the_motion() {
    let (w, h) = (128, 96);
    let mpp = 0.004;
    let mut rng = SimRng::new(314);
    let truth: Vec<(f64, f64)> = (0..40)
        .map(|_| (rng.normal(0.0, 6.0), rng.normal(0.0, 3.0)))
        .collect();
    let frames: Vec<Frame> = truth
        .iter()
        .enumerate()
        .map(|(i, (px, py))| {
            let pixels =
                render_gaussian_spot(w, h, (64.0 + px, 48.0 + py), 2.5, 255, 5);
            Frame::new(w, h, pixels, i, 30.0).unwrap()
        })
        .collect();
    let cal = Calibration::from_scale(mpp).unwrap();
    let series = extract_series(&frames, &cal, 40, Boresight::Mean).unwrap();
    assert!(series.gaps.is_empty());
    let mean_px = truth.iter().map(|t| t.0).sum::<f64>() / truth.len() as f64;
    let mean_py = truth.iter().map(|t| t.1).sum::<f64>() / truth.len() as f64;
    for (sample, (px, py)) in series.samples.iter().zip(&truth) {
        let expected_dx = (px - mean_px) * mpp;
        let expected_dy = (py - mean_py) * mpp;
        assert!(
            (sample.dx_m - expected_dx).abs() < 0.5 * mpp,
            "frame {}: dx {} vs {}",
            sample.frame_index,
            sample.dx_m,
            expected_dx
        );
        assert!((sample.dy_m - expected_dy).abs() < 0.5 * mpp);
    }
}

#[test]
fn reference_disc_calibration_is_stable_across_thresholds() {
    let (w, h) = (128, 96);
    let pixels = render_disc(w, h, (64.0, 48.0), 24.5, 255, 5);
    let frame = Frame::new(w, h, pixels, 0, 30.0).unwrap();
    for threshold in [40, 100, 200] {
        let cal = calibrate(&frame, threshold, 0.196).unwrap();
        assert_eq!(cal.ref_diameter_px, 49.0, "threshold {threshold}");
        assert!((cal.meters_per_pixel - 0.004).abs() < 1e-15);
    }
}

#[test]
fn wind_speed_direction_and_magnitude_match_scenarios() {
    for scenario in [
        WindScenario::UnidirectionalX,
        WindScenario::UnidirectionalY,
        WindScenario::UnidirectionalZ,
    ] {
        let params = WindParams::preset(scenario, 4);
        let field = fsojitter::forcing::WindField::new(params).unwrap();
        let v: Vector3<f64> = field.speed_at(1.0);
        let axis = scenario.axis().unwrap();
        for i in 0..3 {
            if i != axis {
                assert_eq!(v[i], 0.0);
            }
        }
    }
}
