//! Step costs and goal priors scored by every policy.
//!
//! Control quality is a quadratic penalty on the deviation from the desired
//! state plus a quadratic effort penalty. Sensing quality trades the
//! spectrum occupied by the sensing waveform against the information the
//! resulting measurement carries:
//!
//! ```text
//! j_sensing(k) = alpha k^2 + beta ln det R(k)
//! ```
//!
//! The same weights act as goal priors during planning: `Q_goal` is the
//! precision of a Gaussian prior pinning the next state to the desired
//! trajectory, and `R_goal` the precision of a zero-mean prior on the
//! control effort.

use serde::{Deserialize, Serialize};

use crate::gaussian::{ControlMatrix, StateMatrix, StateVector};
use crate::model::{ControlInput, TrajectoryParams, UavState};
use crate::sensing::{obs_covariance, SensingParams, SubcarrierAllocation};
use crate::{Error, Result};

fn default_q_goal_diag() -> [f64; 4] {
    [10.0, 1.0, 0.1, 0.1]
}
fn default_r_goal_diag() -> [f64; 2] {
    [0.01, 0.01]
}
fn default_alpha() -> f64 {
    1e-3
}
fn default_beta() -> f64 {
    1.0
}

/// Goal weights shared by cost reporting and planning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalParams {
    /// Diagonal of the state-deviation weight `Q_goal`.
    #[serde(default = "default_q_goal_diag")]
    pub q_goal_diag: [f64; 4],
    /// Diagonal of the control-effort weight `R_goal`.
    #[serde(default = "default_r_goal_diag")]
    pub r_goal_diag: [f64; 2],
    /// Spectrum-occupancy weight in the sensing cost.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Measurement-uncertainty weight in the sensing cost.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Desired reference trajectory.
    #[serde(default)]
    pub traj: TrajectoryParams,
}

impl Default for GoalParams {
    fn default() -> Self {
        Self {
            q_goal_diag: default_q_goal_diag(),
            r_goal_diag: default_r_goal_diag(),
            alpha: default_alpha(),
            beta: default_beta(),
            traj: TrajectoryParams::default(),
        }
    }
}

impl GoalParams {
    pub fn q_goal(&self) -> StateMatrix {
        StateMatrix::from_diagonal(&StateVector::from_row_slice(&self.q_goal_diag))
    }

    pub fn r_goal(&self) -> ControlMatrix {
        ControlMatrix::from_diagonal(&nalgebra::Vector2::from_row_slice(&self.r_goal_diag))
    }

    /// Inverse of `Q_goal`, i.e. the covariance of the goal prior on the
    /// next state. Diagonal, so the inverse is the reciprocal diagonal.
    pub fn q_goal_inv(&self) -> StateMatrix {
        StateMatrix::from_diagonal(&StateVector::from_iterator(
            self.q_goal_diag.iter().map(|w| 1.0 / w),
        ))
    }

    pub fn validate(&self) -> Result<()> {
        for &w in &self.q_goal_diag {
            if w <= 0.0 {
                return Err(Error::NonPositive { name: "q_goal_diag entry", value: w });
            }
        }
        for &w in &self.r_goal_diag {
            if w <= 0.0 {
                return Err(Error::NonPositive { name: "r_goal_diag entry", value: w });
            }
        }
        if self.alpha <= 0.0 {
            return Err(Error::NonPositive { name: "alpha", value: self.alpha });
        }
        if self.beta <= 0.0 {
            return Err(Error::NonPositive { name: "beta", value: self.beta });
        }
        Ok(())
    }
}

/// Costs charged in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepCosts {
    pub control: f64,
    pub sensing: f64,
}

impl StepCosts {
    pub fn total(&self) -> f64 {
        self.control + self.sensing
    }
}

/// Quadratic control cost `(x - x_des)^T Q_goal (x - x_des) + u^T R_goal u`.
pub fn control_cost(x: &UavState, x_des: &UavState, u: &ControlInput, goals: &GoalParams) -> f64 {
    let dx = x.as_vector() - x_des.as_vector();
    let uv = u.as_vector();
    (dx.transpose() * goals.q_goal() * dx)[(0, 0)] + (uv.transpose() * goals.r_goal() * uv)[(0, 0)]
}

/// Sensing cost `alpha k^2 + beta ln det R(k)` of allocating `k`
/// subcarriers.
pub fn sensing_cost(k: SubcarrierAllocation, goals: &GoalParams, sensing: &SensingParams) -> f64 {
    let r = obs_covariance(k, sensing);
    let kf = k.get() as f64;
    goals.alpha * kf * kf + goals.beta * (r[(0, 0)] * r[(1, 1)]).ln()
}

/// Sum per-step costs over an episode.
pub fn cumulative_cost(steps: &[StepCosts]) -> Result<StepCosts> {
    if steps.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(steps.iter().fold(StepCosts::default(), |acc, s| StepCosts {
        control: acc.control + s.control,
        sensing: acc.sensing + s.sensing,
    }))
}

/// Log-density (up to an additive constant) of the goal priors at a
/// candidate next state and control: `-0.5 (x - x_des)^T Q_goal (x - x_des)
/// - 0.5 u^T R_goal u`.
pub fn goal_prior_log_density(
    x_next: &UavState,
    x_des: &UavState,
    u: &ControlInput,
    goals: &GoalParams,
) -> f64 {
    -0.5 * control_cost(x_next, x_des, u, goals)
}
