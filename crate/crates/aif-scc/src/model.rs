//! Ground-truth UAV dynamics, system matrices, and the desired reference
//! trajectory.
//!
//! The UAV moves in polar coordinates around the base station under a
//! constant-acceleration model: position components integrate velocity,
//! velocity components integrate the commanded acceleration, and zero-mean
//! Gaussian process noise perturbs every component each step.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gaussian::{
    sample_gaussian, GaussianBelief, InputMatrix, MeasurementMatrix, StateMatrix, StateVector,
};
use crate::{Error, Result};

/// UAV kinematic state in polar coordinates around the base station.
///
/// The azimuth is kept unwrapped (a plain real); the linear-Gaussian
/// machinery assumes a Euclidean state and one tracked revolution keeps
/// the angle well within a single wrap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    /// Radial distance to the base station (m).
    pub rho: f64,
    /// Azimuth angle (rad, unwrapped).
    pub psi: f64,
    /// Radial velocity (m/s).
    pub v_rho: f64,
    /// Angular velocity (rad/s).
    pub omega: f64,
}

impl UavState {
    pub fn new(rho: f64, psi: f64, v_rho: f64, omega: f64) -> Self {
        Self { rho, psi, v_rho, omega }
    }

    pub fn as_vector(&self) -> StateVector {
        StateVector::new(self.rho, self.psi, self.v_rho, self.omega)
    }

    pub fn from_vector(v: &StateVector) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.psi.is_finite() && self.v_rho.is_finite() && self.omega.is_finite()
    }
}

/// Commanded radial and angular acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    /// Radial acceleration (m/s^2).
    pub a_rho: f64,
    /// Angular acceleration (rad/s^2).
    pub a_omega: f64,
}

impl ControlInput {
    pub const ZERO: ControlInput = ControlInput { a_rho: 0.0, a_omega: 0.0 };

    pub fn new(a_rho: f64, a_omega: f64) -> Self {
        Self { a_rho, a_omega }
    }

    pub fn as_vector(&self) -> nalgebra::Vector2<f64> {
        nalgebra::Vector2::new(self.a_rho, self.a_omega)
    }

    pub fn from_vector(v: &nalgebra::Vector2<f64>) -> Self {
        Self::new(v[0], v[1])
    }
}

/// System matrices of the constant-acceleration model plus the measurement
/// matrix selecting the observed components.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Sampling interval (s).
    pub dt: f64,
    /// 4x4 state transition matrix.
    pub a: StateMatrix,
    /// 4x2 input matrix.
    pub b: InputMatrix,
    /// 4x4 process-noise covariance.
    pub q: StateMatrix,
    /// 2x4 measurement matrix `[I2, 0]`.
    pub c: MeasurementMatrix,
}

/// Assemble the system matrices for a sampling interval `dt` and diagonal
/// process-noise covariance `diag(q_diag)`.
pub fn make_model(dt: f64, q_diag: [f64; 4]) -> Result<ModelParams> {
    if dt <= 0.0 {
        return Err(Error::NonPositive { name: "dt", value: dt });
    }
    for &q in &q_diag {
        if q <= 0.0 {
            return Err(Error::NonPositive { name: "q_diag entry", value: q });
        }
    }
    let half_dt2 = 0.5 * dt * dt;
    #[rustfmt::skip]
    let a = StateMatrix::new(
        1.0, 0.0, dt,  0.0,
        0.0, 1.0, 0.0, dt,
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    );
    #[rustfmt::skip]
    let b = InputMatrix::new(
        half_dt2, 0.0,
        0.0,      half_dt2,
        dt,       0.0,
        0.0,      dt,
    );
    let q = StateMatrix::from_diagonal(&StateVector::new(q_diag[0], q_diag[1], q_diag[2], q_diag[3]));
    #[rustfmt::skip]
    let c = MeasurementMatrix::new(
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
    );
    Ok(ModelParams { dt, a, b, q, c })
}

impl ModelParams {
    /// The noise-free dynamics `A x + B u`.
    pub fn step_deterministic(&self, x: &UavState, u: &ControlInput) -> UavState {
        UavState::from_vector(&(self.a * x.as_vector() + self.b * u.as_vector()))
    }
}

/// Advance the true state one step: `A x + B u + n`, `n ~ N(0, Q)`.
///
/// Deterministic given the RNG state; a zero `Q` reduces to the noise-free
/// dynamics.
pub fn step_truth<R: Rng>(
    m: &ModelParams,
    x: &UavState,
    u: &ControlInput,
    rng: &mut R,
) -> Result<UavState> {
    let mean = m.a * x.as_vector() + m.b * u.as_vector();
    let next = sample_gaussian(rng, &GaussianBelief::new(mean, m.q))?;
    Ok(UavState::from_vector(&next))
}

/// Parameters of the desired reference trajectory: a radial sinusoid at
/// constant angular rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryParams {
    /// Amplitude of the radial oscillation (m); also the amplitude of the
    /// desired radial velocity (m/s).
    pub amplitude: f64,
    /// Angular frequency of the radial oscillation (rad/s).
    pub frequency: f64,
    /// Mean radial distance (m).
    pub offset: f64,
    /// Constant desired angular velocity (rad/s).
    pub omega: f64,
}

impl Default for TrajectoryParams {
    fn default() -> Self {
        Self { amplitude: 5.0, frequency: 0.5, offset: 50.0, omega: 0.1 }
    }
}

/// Desired state at continuous time `t_seconds`.
///
/// The azimuth integrates the constant angular rate from `psi(0) = 0`.
pub fn desired_state(t_seconds: f64, traj: &TrajectoryParams) -> UavState {
    UavState::new(
        traj.amplitude * (traj.frequency * t_seconds).sin() + traj.offset,
        traj.omega * t_seconds,
        traj.amplitude * (traj.frequency * t_seconds).cos(),
        traj.omega,
    )
}
