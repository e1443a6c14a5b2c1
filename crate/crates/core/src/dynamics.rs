//! Lumped six-degree-of-freedom platform vibration model
//! M·q̈ + C·q̇ + K·q = B·F(t), integrated with a fixed-step classical
//! fourth-order Runge-Kutta scheme.
//!
//! The integrator is deliberately fixed-step and explicit: given the same
//! system, initial state, forcing, and step, trajectories reproduce
//! bit-identically.

use nalgebra::{Complex, Matrix6, Vector6};
use thiserror::Error;

use crate::forcing::Forcing;

/// Index order of the six generalized coordinates. Translations (x, y, z)
/// are in meters; rotations (roll about x, pitch about y, yaw about z) are
/// in radians. `y` is the gravity path and `z` the optical link path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dof {
    X = 0,
    Y = 1,
    Z = 2,
    Roll = 3,
    Pitch = 4,
    Yaw = 5,
}

impl Dof {
    pub const ALL: [Dof; 6] = [Dof::X, Dof::Y, Dof::Z, Dof::Roll, Dof::Pitch, Dof::Yaw];

    pub fn name(self) -> &'static str {
        match self {
            Dof::X => "x",
            Dof::Y => "y",
            Dof::Z => "z",
            Dof::Roll => "roll",
            Dof::Pitch => "pitch",
            Dof::Yaw => "yaw",
        }
    }

    pub fn is_translation(self) -> bool {
        (self as usize) < 3
    }
}

/// |q| bound beyond which [`integrate`] reports divergence (m or rad).
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e3;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("forcing returned a non-finite value at t = {t} s")]
    NonFiniteForcing { t: f64 },
    #[error("integration diverged at t = {t} s: |{dof}| = {magnitude:.3e} exceeds bound {bound:.3e}")]
    Diverged {
        t: f64,
        dof: &'static str,
        magnitude: f64,
        bound: f64,
    },
}

/// Mass, damping, stiffness, and input matrices of the platform.
///
/// Units per row follow the coordinate layout: kg / kg·m² on the mass
/// diagonal, N/m / N·m/rad on the stiffness diagonal. `input` maps applied
/// force/torque components onto generalized-force rows and is dimensionless.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemMatrices {
    pub mass: Matrix6<f64>,
    pub damping: Matrix6<f64>,
    pub stiffness: Matrix6<f64>,
    pub input: Matrix6<f64>,
    mass_inv: Matrix6<f64>,
}

impl SystemMatrices {
    /// Validates finiteness, symmetry of K and C, and invertibility of M.
    /// Positive-definiteness of K is the caller's responsibility (it holds
    /// for everything [`build_system`] produces).
    pub fn new(
        mass: Matrix6<f64>,
        damping: Matrix6<f64>,
        stiffness: Matrix6<f64>,
        input: Matrix6<f64>,
    ) -> Result<Self, DynamicsError> {
        for m in [&mass, &damping, &stiffness, &input] {
            if m.iter().any(|x| !x.is_finite()) {
                return Err(DynamicsError::UnsupportedConfiguration(
                    "system matrices must be finite".into(),
                ));
            }
        }
        for (name, m) in [("stiffness", &stiffness), ("damping", &damping)] {
            let scale = m.amax().max(1.0);
            if (m - m.transpose()).amax() > 1e-9 * scale {
                return Err(DynamicsError::UnsupportedConfiguration(format!(
                    "{name} matrix must be symmetric"
                )));
            }
        }
        let mass_inv = mass.try_inverse().ok_or_else(|| {
            DynamicsError::UnsupportedConfiguration("mass matrix is singular".into())
        })?;
        Ok(Self {
            mass,
            damping,
            stiffness,
            input,
            mass_inv,
        })
    }

    pub fn mass_inverse(&self) -> &Matrix6<f64> {
        &self.mass_inv
    }

    fn is_diagonal(m: &Matrix6<f64>) -> bool {
        for i in 0..6 {
            for j in 0..6 {
                if i != j && m[(i, j)] != 0.0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Assembles the default platform: diagonal M from mass and inertias,
/// diagonal K with `k_trans` on the translational rows and `k_rot` on the
/// rotational rows, proportional damping C = α·K, and B = identity unless
/// an input matrix is supplied.
pub fn build_system(
    mass_kg: f64,
    inertia_kgm2: [f64; 3],
    k_trans: f64,
    k_rot: f64,
    damping_alpha: f64,
    input_matrix: Option<Matrix6<f64>>,
) -> Result<SystemMatrices, DynamicsError> {
    if !(mass_kg > 0.0) {
        return Err(DynamicsError::InvalidParameter {
            name: "mass_kg",
            value: mass_kg,
        });
    }
    for (i, inertia) in inertia_kgm2.iter().enumerate() {
        if !(*inertia > 0.0) {
            return Err(DynamicsError::InvalidParameter {
                name: ["inertia_roll", "inertia_pitch", "inertia_yaw"][i],
                value: *inertia,
            });
        }
    }
    if !(k_trans > 0.0) {
        return Err(DynamicsError::InvalidParameter {
            name: "k_trans",
            value: k_trans,
        });
    }
    if !(k_rot > 0.0) {
        return Err(DynamicsError::InvalidParameter {
            name: "k_rot",
            value: k_rot,
        });
    }
    if !(damping_alpha >= 0.0) {
        return Err(DynamicsError::InvalidParameter {
            name: "damping_alpha",
            value: damping_alpha,
        });
    }
    let mass = Matrix6::from_diagonal(&Vector6::new(
        mass_kg,
        mass_kg,
        mass_kg,
        inertia_kgm2[0],
        inertia_kgm2[1],
        inertia_kgm2[2],
    ));
    let stiffness = Matrix6::from_diagonal(&Vector6::new(
        k_trans, k_trans, k_trans, k_rot, k_rot, k_rot,
    ));
    let damping = stiffness * damping_alpha;
    let input = input_matrix.unwrap_or_else(Matrix6::identity);
    SystemMatrices::new(mass, damping, stiffness, input)
}

/// Undamped natural frequency per coordinate, ω_i = √(K_ii / M_ii), in
/// rad/s, returned in coordinate order. Requires diagonal M and K.
pub fn natural_frequencies(system: &SystemMatrices) -> Result<Vector6<f64>, DynamicsError> {
    if !SystemMatrices::is_diagonal(&system.mass) || !SystemMatrices::is_diagonal(&system.stiffness)
    {
        return Err(DynamicsError::UnsupportedConfiguration(
            "natural frequencies require diagonal mass and stiffness matrices".into(),
        ));
    }
    Ok(Vector6::from_fn(|i, _| {
        (system.stiffness[(i, i)] / system.mass[(i, i)]).sqrt()
    }))
}

/// Platform state at one instant: time, generalized coordinates, and
/// generalized velocities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlatformState {
    pub t: f64,
    pub q: Vector6<f64>,
    pub qdot: Vector6<f64>,
}

impl PlatformState {
    pub fn zero() -> Self {
        Self {
            t: 0.0,
            q: Vector6::zeros(),
            qdot: Vector6::zeros(),
        }
    }

    pub fn at_rest(q: Vector6<f64>) -> Self {
        Self {
            t: 0.0,
            q,
            qdot: Vector6::zeros(),
        }
    }
}

/// Uniformly sampled sequence of platform states.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<PlatformState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn duration(&self) -> f64 {
        match (self.states.first(), self.states.last()) {
            (Some(first), Some(last)) => last.t - first.t,
            _ => 0.0,
        }
    }

    /// One coordinate's history.
    pub fn dof_series(&self, dof: Dof) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(move |s| s.q[dof as usize])
    }
}

fn acceleration(
    system: &SystemMatrices,
    q: &Vector6<f64>,
    qdot: &Vector6<f64>,
    applied: &Vector6<f64>,
) -> Vector6<f64> {
    system.mass_inv * (system.input * applied - system.damping * qdot - system.stiffness * q)
}

fn checked_force(forcing: &dyn Forcing, t: f64) -> Result<Vector6<f64>, DynamicsError> {
    let f = forcing.force(t);
    if f.iter().any(|x| !x.is_finite()) {
        return Err(DynamicsError::NonFiniteForcing { t });
    }
    Ok(f)
}

/// One classical RK4 update of the first-order form
/// (q, q̇)' = (q̇, M⁻¹(B·F(t) − C·q̇ − K·q)).
pub fn rk4_step(
    system: &SystemMatrices,
    state: &PlatformState,
    dt: f64,
    forcing: &dyn Forcing,
) -> Result<PlatformState, DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::InvalidParameter {
            name: "dt",
            value: dt,
        });
    }
    let t = state.t;
    let f0 = checked_force(forcing, t)?;
    let f_half = checked_force(forcing, t + dt / 2.0)?;
    let f1 = checked_force(forcing, t + dt)?;

    let k1_q = state.qdot;
    let k1_v = acceleration(system, &state.q, &state.qdot, &f0);

    let q2 = state.q + k1_q * (dt / 2.0);
    let v2 = state.qdot + k1_v * (dt / 2.0);
    let k2_q = v2;
    let k2_v = acceleration(system, &q2, &v2, &f_half);

    let q3 = state.q + k2_q * (dt / 2.0);
    let v3 = state.qdot + k2_v * (dt / 2.0);
    let k3_q = v3;
    let k3_v = acceleration(system, &q3, &v3, &f_half);

    let q4 = state.q + k3_q * dt;
    let v4 = state.qdot + k3_v * dt;
    let k4_q = v4;
    let k4_v = acceleration(system, &q4, &v4, &f1);

    Ok(PlatformState {
        t: t + dt,
        q: state.q + (k1_q + k2_q * 2.0 + k3_q * 2.0 + k4_q) * (dt / 6.0),
        qdot: state.qdot + (k1_v + k2_v * 2.0 + k3_v * 2.0 + k4_v) * (dt / 6.0),
    })
}

/// Integrates over `duration` with the default divergence bound. The result
/// holds floor(duration/dt)+1 states at exactly uniform spacing.
pub fn integrate(
    system: &SystemMatrices,
    initial: PlatformState,
    forcing: &dyn Forcing,
    duration: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    integrate_bounded(
        system,
        initial,
        forcing,
        duration,
        dt,
        DEFAULT_DIVERGENCE_BOUND,
    )
}

/// [`integrate`] with an explicit divergence bound on |q| components.
pub fn integrate_bounded(
    system: &SystemMatrices,
    initial: PlatformState,
    forcing: &dyn Forcing,
    duration: f64,
    dt: f64,
    divergence_bound: f64,
) -> Result<Trajectory, DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::InvalidParameter {
            name: "dt",
            value: dt,
        });
    }
    if duration < dt {
        return Err(DynamicsError::InvalidParameter {
            name: "duration",
            value: duration,
        });
    }
    // The epsilon guards exact divisions (e.g. 0.3/0.1) against fp floor
    // truncation.
    let steps = (duration / dt + 1e-9).floor() as usize;
    let t0 = initial.t;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial);
    let mut current = initial;
    for i in 0..steps {
        let mut next = rk4_step(system, &current, dt, forcing)?;
        // Pin the timestamp to the exact grid so spacing never drifts.
        next.t = t0 + (i + 1) as f64 * dt;
        for dof in Dof::ALL {
            let magnitude = next.q[dof as usize].abs();
            if !magnitude.is_finite() || magnitude > divergence_bound {
                return Err(DynamicsError::Diverged {
                    t: next.t,
                    dof: dof.name(),
                    magnitude,
                    bound: divergence_bound,
                });
            }
        }
        states.push(next);
        current = next;
    }
    Ok(Trajectory { dt, states })
}

/// Static deflection K⁻¹·B·F of a constant generalized force.
pub fn static_deflection(
    system: &SystemMatrices,
    applied: &Vector6<f64>,
) -> Result<Vector6<f64>, DynamicsError> {
    system
        .stiffness
        .lu()
        .solve(&(system.input * applied))
        .ok_or_else(|| {
            DynamicsError::UnsupportedConfiguration("stiffness matrix is singular".into())
        })
}

/// Steady-state particular solution for sinusoidal forcing
/// F(t) = amplitude·sin(ω·t): the state (q, q̇) on the periodic orbit at
/// t = 0. Solves (K − ω²M + iωC)·X = B·amplitude in complex arithmetic.
///
/// Starting an integration from `static_deflection` of the mean force plus
/// this state removes the onset transient entirely for linear systems.
pub fn harmonic_particular_state(
    system: &SystemMatrices,
    amplitude: &Vector6<f64>,
    omega: f64,
) -> Result<PlatformState, DynamicsError> {
    if !(omega > 0.0) {
        return Err(DynamicsError::InvalidParameter {
            name: "omega",
            value: omega,
        });
    }
    let a = Matrix6::<Complex<f64>>::from_fn(|i, j| {
        Complex::new(
            system.stiffness[(i, j)] - omega * omega * system.mass[(i, j)],
            omega * system.damping[(i, j)],
        )
    });
    let rhs_re = system.input * amplitude;
    let rhs = Vector6::<Complex<f64>>::from_fn(|i, _| Complex::new(rhs_re[i], 0.0));
    let x = a.lu().solve(&rhs).ok_or_else(|| {
        DynamicsError::UnsupportedConfiguration(
            "undamped resonance: harmonic steady state is singular".into(),
        )
    })?;
    // q_p(t) = Im(X·e^{iωt}) = Re(X)·sin(ωt) + Im(X)·cos(ωt)
    Ok(PlatformState {
        t: 0.0,
        q: Vector6::from_fn(|i, _| x[i].im),
        qdot: Vector6::from_fn(|i, _| omega * x[i].re),
    })
}

/// Total mechanical energy ½·q̇ᵀMq̇ + ½·qᵀKq.
pub fn total_energy(system: &SystemMatrices, state: &PlatformState) -> f64 {
    0.5 * state.qdot.dot(&(system.mass * state.qdot))
        + 0.5 * state.q.dot(&(system.stiffness * state.q))
}
