//! Generalized force histories that drive the platform vibration equation:
//! deterministic propeller thrust with blade-pass ripple, and stochastic
//! wind loading under named scenarios.
//!
//! A force history is anything implementing [`Forcing`]: a rule mapping time
//! to the six generalized force components (N on the translational rows,
//! N·m on the rotational rows). Stochastic implementations pre-materialize
//! their noise at construction, so evaluation at any time is a pure function
//! and evaluation order can never change results.

use nalgebra::{Vector3, Vector6};
use thiserror::Error;

use crate::dynamics::Dof;
use crate::rng::SimRng;

/// Standard gravity, m/s².
pub const GRAVITY_MPS2: f64 = 9.81;

/// Thrust axis of a hovering rotorcraft: the vertical (gravity-path) axis.
pub const THRUST_AXIS: Dof = Dof::Y;

#[derive(Debug, Error, PartialEq)]
pub enum ForcingError {
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("unknown {what}: {got:?}")]
    UnknownName { what: &'static str, got: String },
}

/// Evaluation rule t → 6-vector of generalized forces.
///
/// Implementations must be pure in `t`: repeated evaluation at the same time
/// returns bit-identical values, and concurrent evaluation at distinct times
/// is safe.
pub trait Forcing: Send + Sync {
    fn force(&self, t: f64) -> Vector6<f64>;
}

impl<F> Forcing for F
where
    F: Fn(f64) -> Vector6<f64> + Send + Sync,
{
    fn force(&self, t: f64) -> Vector6<f64> {
        self(t)
    }
}

/// No forcing at all.
pub struct ZeroForcing;

impl Forcing for ZeroForcing {
    fn force(&self, _t: f64) -> Vector6<f64> {
        Vector6::zeros()
    }
}

/// Time-independent generalized force.
pub struct ConstantForcing(pub Vector6<f64>);

impl Forcing for ConstantForcing {
    fn force(&self, _t: f64) -> Vector6<f64> {
        self.0
    }
}

/// Sum of several force histories (e.g. propeller + wind).
pub struct CompositeForcing {
    pub parts: Vec<Box<dyn Forcing>>,
}

impl Forcing for CompositeForcing {
    fn force(&self, t: f64) -> Vector6<f64> {
        self.parts
            .iter()
            .fold(Vector6::zeros(), |acc, p| acc + p.force(t))
    }
}

// ---------------------------------------------------------------------------
// Propeller forcing
// ---------------------------------------------------------------------------

/// Parameters of the propeller force model
/// F = m·a − b·v² (thrust axis), plus hover lift m·g when hovering.
#[derive(Clone, Debug, PartialEq)]
pub struct PropellerParams {
    /// Platform mass, kg.
    pub m_hap_kg: f64,
    /// Drag constant, N·s²/m².
    pub b_drag: f64,
    /// Platform speed, m/s.
    pub v_hap_mps: f64,
    /// Commanded acceleration, m/s² (x, y, z).
    pub a_hap_mps2: [f64; 3],
    /// Thrust oscillation amplitude as a fraction of the mean force, 0..=1.
    pub ripple_fraction: f64,
    /// Blade-passing frequency, Hz.
    pub blade_pass_hz: f64,
    /// Lever arm converting thrust ripple into roll/pitch torque, m.
    pub torque_arm_m: f64,
    /// When set, the mean force includes hover lift m·g on the thrust axis.
    pub hover: bool,
}

impl Default for PropellerParams {
    fn default() -> Self {
        Self {
            m_hap_kg: 0.7,
            b_drag: 0.0,
            v_hap_mps: 0.0,
            a_hap_mps2: [0.0; 3],
            ripple_fraction: 0.05,
            blade_pass_hz: 100.0,
            torque_arm_m: 0.05,
            hover: true,
        }
    }
}

impl PropellerParams {
    pub fn validate(&self) -> Result<(), ForcingError> {
        if !(self.m_hap_kg > 0.0) {
            return Err(ForcingError::InvalidParameter {
                name: "m_hap_kg",
                value: self.m_hap_kg,
            });
        }
        if !(0.0..=1.0).contains(&self.ripple_fraction) {
            return Err(ForcingError::InvalidParameter {
                name: "ripple_fraction",
                value: self.ripple_fraction,
            });
        }
        if !(self.blade_pass_hz > 0.0) {
            return Err(ForcingError::InvalidParameter {
                name: "blade_pass_hz",
                value: self.blade_pass_hz,
            });
        }
        Ok(())
    }
}

/// Mean propeller force vector in N: m·a, minus drag b·v² on the thrust
/// axis, plus hover lift m·g on the thrust axis when hovering.
pub fn propeller_force_mean(p: &PropellerParams) -> Vector3<f64> {
    let mut f = Vector3::new(
        p.m_hap_kg * p.a_hap_mps2[0],
        p.m_hap_kg * p.a_hap_mps2[1],
        p.m_hap_kg * p.a_hap_mps2[2],
    );
    let thrust = THRUST_AXIS as usize;
    f[thrust] -= p.b_drag * p.v_hap_mps * p.v_hap_mps;
    if p.hover {
        f[thrust] += p.m_hap_kg * GRAVITY_MPS2;
    }
    f
}

/// Deterministic propeller force history:
/// F(t) = mean + ripple·|mean|·sin(2π·f_blade·t) on the thrust axis, with
/// the ripple times the torque arm applied as torque on the roll and pitch
/// rows.
pub struct PropellerForcing {
    mean: Vector6<f64>,
    amplitude: Vector6<f64>,
    omega: f64,
}

impl PropellerForcing {
    pub fn new(p: &PropellerParams) -> Result<Self, ForcingError> {
        p.validate()?;
        let mean3 = propeller_force_mean(p);
        let mut mean = Vector6::zeros();
        for i in 0..3 {
            mean[i] = mean3[i];
        }
        let ripple = p.ripple_fraction * mean3.norm();
        let mut amplitude = Vector6::zeros();
        amplitude[THRUST_AXIS as usize] = ripple;
        amplitude[Dof::Roll as usize] = ripple * p.torque_arm_m;
        amplitude[Dof::Pitch as usize] = ripple * p.torque_arm_m;
        Ok(Self {
            mean,
            amplitude,
            omega: 2.0 * std::f64::consts::PI * p.blade_pass_hz,
        })
    }

    /// Time-independent part of the generalized force.
    pub fn mean_generalized(&self) -> Vector6<f64> {
        self.mean
    }

    /// Sinusoidal part: amplitude rows and angular frequency, such that
    /// force(t) = mean + amplitude·sin(ω·t).
    pub fn harmonic_generalized(&self) -> (Vector6<f64>, f64) {
        (self.amplitude, self.omega)
    }
}

impl Forcing for PropellerForcing {
    fn force(&self, t: f64) -> Vector6<f64> {
        self.mean + self.amplitude * (self.omega * t).sin()
    }
}

// ---------------------------------------------------------------------------
// Wind forcing
// ---------------------------------------------------------------------------

/// Named wind condition. The first three are three-dimensional with preset
/// mean speeds; the unidirectional ones confine both mean and gusts to a
/// single axis ('y' along the gravity path, 'z' along the optical link path).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindScenario {
    Calm,
    Typical,
    Turbulent,
    UnidirectionalX,
    UnidirectionalY,
    UnidirectionalZ,
}

impl WindScenario {
    pub const ALL: [WindScenario; 6] = [
        WindScenario::Calm,
        WindScenario::Typical,
        WindScenario::Turbulent,
        WindScenario::UnidirectionalX,
        WindScenario::UnidirectionalY,
        WindScenario::UnidirectionalZ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WindScenario::Calm => "calm",
            WindScenario::Typical => "typical",
            WindScenario::Turbulent => "turbulent",
            WindScenario::UnidirectionalX => "unidirectional-x",
            WindScenario::UnidirectionalY => "unidirectional-y",
            WindScenario::UnidirectionalZ => "unidirectional-z",
        }
    }

    /// Preset mean speed in m/s (calm < 1, typical 5, turbulent 30;
    /// unidirectional scenarios default to the typical speed).
    pub fn preset_mean_speed_mps(self) -> f64 {
        match self {
            WindScenario::Calm => 0.5,
            WindScenario::Turbulent => 30.0,
            _ => 5.0,
        }
    }

    /// Axis the scenario is confined to, if unidirectional.
    pub fn axis(self) -> Option<usize> {
        match self {
            WindScenario::UnidirectionalX => Some(0),
            WindScenario::UnidirectionalY => Some(1),
            WindScenario::UnidirectionalZ => Some(2),
            _ => None,
        }
    }
}

impl std::str::FromStr for WindScenario {
    type Err = ForcingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WindScenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| ForcingError::UnknownName {
                what: "wind scenario",
                got: s.to_string(),
            })
    }
}

/// How a wind velocity becomes a force.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindForceMode {
    /// F = A·ρ·v component-wise.
    AsGiven,
    /// F = ½·A·ρ·|v|·v, the physical drag form.
    QuadraticDrag,
}

impl WindForceMode {
    pub fn name(self) -> &'static str {
        match self {
            WindForceMode::AsGiven => "as-given",
            WindForceMode::QuadraticDrag => "quadratic-drag",
        }
    }
}

impl std::str::FromStr for WindForceMode {
    type Err = ForcingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "as-given" => Ok(WindForceMode::AsGiven),
            "quadratic-drag" => Ok(WindForceMode::QuadraticDrag),
            _ => Err(ForcingError::UnknownName {
                what: "wind force mode",
                got: s.to_string(),
            }),
        }
    }
}

/// Wind model parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct WindParams {
    /// Impact area on the platform, m².
    pub area_m2: f64,
    /// Stratospheric air density, kg/m³ (0 < ρ ≤ 0.2).
    pub rho_strat: f64,
    pub scenario: WindScenario,
    /// Mean wind speed, m/s. `WindParams::preset` fills the scenario value.
    pub mean_speed_mps: f64,
    /// Corner frequency of the first-order gust filter, Hz.
    pub gust_corner_hz: f64,
    /// Gust standard deviation as a fraction of the mean speed.
    pub turbulence_intensity: f64,
    pub seed: u64,
    pub force_mode: WindForceMode,
    /// Pressure-center offset turning force into roll/pitch torque, m.
    pub torque_arm_m: f64,
    /// Per-wind-axis torque coupling gains (x, y, z). The defaults encode
    /// that link-path (z) buffeting tips the platform hardest and x-axis
    /// wind the least.
    pub axis_coupling: [f64; 3],
    /// Length of the pre-materialized gust record, s; the series repeats
    /// periodically beyond it.
    pub horizon_s: f64,
}

impl WindParams {
    /// Scenario preset with the documented default model constants.
    pub fn preset(scenario: WindScenario, seed: u64) -> Self {
        Self {
            area_m2: 10.0,
            rho_strat: 0.1,
            scenario,
            mean_speed_mps: scenario.preset_mean_speed_mps(),
            gust_corner_hz: 2.0,
            turbulence_intensity: 0.2,
            seed,
            force_mode: WindForceMode::AsGiven,
            torque_arm_m: 0.05,
            axis_coupling: [0.5, 1.0, 2.0],
            horizon_s: 120.0,
        }
    }

    pub fn validate(&self) -> Result<(), ForcingError> {
        let checks: [(&'static str, f64, bool); 6] = [
            ("area_m2", self.area_m2, self.area_m2 >= 0.0),
            (
                "rho_strat",
                self.rho_strat,
                self.rho_strat > 0.0 && self.rho_strat <= 0.2,
            ),
            (
                "mean_speed_mps",
                self.mean_speed_mps,
                self.mean_speed_mps >= 0.0,
            ),
            (
                "gust_corner_hz",
                self.gust_corner_hz,
                self.gust_corner_hz > 0.0,
            ),
            (
                "turbulence_intensity",
                self.turbulence_intensity,
                self.turbulence_intensity >= 0.0,
            ),
            ("horizon_s", self.horizon_s, self.horizon_s > 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(ForcingError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    fn mean_velocity(&self) -> Vector3<f64> {
        match self.scenario.axis() {
            Some(axis) => {
                let mut v = Vector3::zeros();
                v[axis] = self.mean_speed_mps;
                v
            }
            // Resultant wind split evenly over the three axes.
            None => Vector3::repeat(self.mean_speed_mps / 3.0_f64.sqrt()),
        }
    }

    fn gust_std(&self) -> f64 {
        self.turbulence_intensity * self.mean_speed_mps
    }
}

/// Converts a wind velocity (m/s) to a force (N) per the configured mode.
pub fn wind_force(w: &WindParams, wind_velocity: Vector3<f64>) -> Vector3<f64> {
    let a_rho = w.area_m2 * w.rho_strat;
    match w.force_mode {
        WindForceMode::AsGiven => wind_velocity * a_rho,
        WindForceMode::QuadraticDrag => wind_velocity * (0.5 * a_rho * wind_velocity.norm()),
    }
}

/// Wind velocity history: scenario mean plus first-order low-pass filtered
/// Gaussian gusts, pre-materialized per axis on a 100 Hz grid.
pub struct WindField {
    params: WindParams,
    mean: Vector3<f64>,
    gusts: [Vec<f64>; 3],
    grid_dt: f64,
    horizon: f64,
}

const GUST_GRID_HZ: f64 = 100.0;

impl WindField {
    pub fn new(params: WindParams) -> Result<Self, ForcingError> {
        params.validate()?;
        let grid_dt = 1.0 / GUST_GRID_HZ;
        let n = (params.horizon_s / grid_dt).ceil() as usize + 2;
        let sigma = params.gust_std();
        // AR(1) discretization of a first-order low-pass filter driven by
        // white Gaussian noise, scaled to the stationary variance sigma².
        let a = (-2.0 * std::f64::consts::PI * params.gust_corner_hz * grid_dt).exp();
        let b = sigma * (1.0 - a * a).sqrt();
        let active_axes: [bool; 3] = match params.scenario.axis() {
            Some(axis) => {
                let mut m = [false; 3];
                m[axis] = true;
                m
            }
            None => [true; 3],
        };
        let gusts = std::array::from_fn(|axis| {
            if !active_axes[axis] || sigma == 0.0 {
                return vec![0.0; n];
            }
            let mut rng = SimRng::with_stream(params.seed, axis as u64);
            let mut table = Vec::with_capacity(n);
            let mut x = sigma * rng.standard_normal();
            table.push(x);
            for _ in 1..n {
                x = a * x + b * rng.standard_normal();
                table.push(x);
            }
            table
        });
        let mean = params.mean_velocity();
        let horizon = params.horizon_s;
        Ok(Self {
            params,
            mean,
            gusts,
            grid_dt,
            horizon,
        })
    }

    pub fn params(&self) -> &WindParams {
        &self.params
    }

    /// Wind velocity vector at time `t` (m/s). Times beyond the horizon wrap
    /// periodically.
    pub fn speed_at(&self, t: f64) -> Vector3<f64> {
        let t = t.rem_euclid(self.horizon);
        let pos = t / self.grid_dt;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        Vector3::from_fn(|axis, _| {
            let table = &self.gusts[axis];
            let i = i.min(table.len() - 2);
            self.mean[axis] + table[i] + (table[i + 1] - table[i]) * frac
        })
    }

    /// Wind force at time `t` (N).
    pub fn force_at(&self, t: f64) -> Vector3<f64> {
        wind_force(&self.params, self.speed_at(t))
    }
}

/// Convenience wrapper over [`WindField::speed_at`] for one-off evaluation.
pub fn wind_speed_series(w: &WindParams, t: f64) -> Result<Vector3<f64>, ForcingError> {
    Ok(WindField::new(w.clone())?.speed_at(t))
}

/// Stochastic wind force history over the six generalized coordinates.
///
/// The force components land on the translational rows; torques are
/// force × (coupling gain × arm), with x-axis wind pitching the platform,
/// y-axis wind rolling it, and z-axis (link-path) wind splitting equally
/// across roll and pitch.
pub struct WindForcing {
    field: WindField,
}

impl WindForcing {
    pub fn new(params: WindParams) -> Result<Self, ForcingError> {
        Ok(Self {
            field: WindField::new(params)?,
        })
    }

    pub fn field(&self) -> &WindField {
        &self.field
    }

    fn generalized(&self, f: Vector3<f64>) -> Vector6<f64> {
        let p = self.field.params();
        let mut g = Vector6::zeros();
        for i in 0..3 {
            g[i] = f[i];
        }
        let arm = p.torque_arm_m;
        let [cx, cy, cz] = p.axis_coupling;
        g[Dof::Pitch as usize] += cx * arm * f[0];
        g[Dof::Roll as usize] += cy * arm * f[1];
        let split = cz * arm * f[2] / 2.0_f64.sqrt();
        g[Dof::Roll as usize] += split;
        g[Dof::Pitch as usize] += split;
        g
    }

    /// Generalized force of the mean wind alone (used for equilibrium
    /// initialization).
    pub fn mean_generalized(&self) -> Vector6<f64> {
        let p = self.field.params();
        self.generalized(wind_force(p, p.mean_velocity()))
    }
}

impl Forcing for WindForcing {
    fn force(&self, t: f64) -> Vector6<f64> {
        self.generalized(self.field.force_at(t))
    }
}
