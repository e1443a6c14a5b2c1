//! Pointing-jitter simulation and link-budget analysis for airborne
//! free-space optical (FSO) transmitters.
//!
//! The crate models an airborne platform (drone or balloon) carrying a laser
//! terminal as a lumped six-degree-of-freedom mass-spring-damper system,
//! drives it with propeller and wind forcing, converts the resulting motion
//! into beam pointing error at a distant receiver, fits the error statistics,
//! and evaluates the optical losses those errors cause.
//!
//! Module map:
//!
//! - [`dynamics`] — the MDOF vibration equation M·q̈ + C·q̇ + K·q = B·F(t)
//!   and its fixed-step RK4 integrator.
//! - [`forcing`] — deterministic propeller thrust/ripple and stochastic wind
//!   gust force histories.
//! - [`pointing`] — trajectory → receiver-plane pointing series, summary
//!   statistics, Gaussian and Rayleigh fits.
//! - [`linkbudget`] — attenuation ratios, geometric loss, and misalignment
//!   loss under a flat-top beam model.
//! - [`tracker`] — the frame-based measurement pipeline: spot centroiding,
//!   pixel calibration, displacement extraction.
//! - [`rng`] — the seeded, stream-splittable random source every stochastic
//!   component draws from.
//!
//! Everything is deterministic for a given seed: simulations, gust series,
//! and Monte Carlo estimates reproduce bit-identically.

pub mod dynamics;
pub mod forcing;
pub mod linkbudget;
pub mod pointing;
pub mod rng;
pub mod tracker;

pub use dynamics::{PlatformState, SystemMatrices, Trajectory};
pub use forcing::Forcing;
pub use pointing::{PointingSample, PointingSeries, StatsSummary};
