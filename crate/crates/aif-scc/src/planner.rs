//! One-step action selection: a closed-form Gaussian posterior over the
//! control input and an exhaustive search over the sensing allocation.
//!
//! The control side scores each candidate `u` by how well the predicted
//! next state matches the desired one under the goal prior, marginalizing
//! over the current state belief and the process noise:
//!
//! ```text
//! Sigma_u  = A W_t A^T + Q + Q_goal^-1
//! W_u^-1   = B^T Sigma_u^-1 B + R_goal
//! m_u      = W_u B^T Sigma_u^-1 (x_desired_next - A m_t)
//! ```
//!
//! The planned control is the mode `m_u`. The sensing side is independent
//! of the belief under the one-step scheme: the measurement enters the
//! objective only through `ln det R(k)`, so the best allocation is found by
//! evaluating the sensing cost at every `k` and taking the argmin.

use serde::{Deserialize, Serialize};

use crate::gaussian::{spd_inverse, symmetrize, ControlBelief, StateBelief};
use crate::model::{ControlInput, ModelParams, UavState};
use crate::objective::{sensing_cost, GoalParams};
use crate::sensing::{SensingParams, SubcarrierAllocation};
use crate::Result;

/// Gaussian posterior over the control input for the current slot.
pub type ControlPosterior = ControlBelief;

/// The pair of actions chosen for one slot: the control to apply now and
/// the subcarriers to allocate for the next measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannedAction {
    pub u: ControlInput,
    pub k_next: SubcarrierAllocation,
}

/// Closed-form posterior over the control input given the current belief
/// and the desired next state.
pub fn control_posterior(
    m: &ModelParams,
    g: &GoalParams,
    belief: &StateBelief,
    x_desired_next: &UavState,
) -> Result<ControlPosterior> {
    let sigma_u = symmetrize(&(m.a * belief.cov * m.a.transpose() + m.q + g.q_goal_inv()));
    let sigma_u_inv = spd_inverse(&sigma_u)?;
    let precision = symmetrize(&(m.b.transpose() * sigma_u_inv * m.b + g.r_goal()));
    let cov = spd_inverse(&precision)?;
    let discrepancy = x_desired_next.as_vector() - m.a * belief.mean;
    let mean = cov * (m.b.transpose() * (sigma_u_inv * discrepancy));
    Ok(ControlPosterior::new(mean, cov))
}

/// The planned control is the mode of the posterior, which for a Gaussian
/// is its mean.
pub fn select_control(cp: &ControlPosterior) -> ControlInput {
    ControlInput::from_vector(&cp.mean)
}

/// Exhaustive search for the allocation minimizing the sensing cost.
///
/// Ties break toward smaller `k` (the cheaper allocation). The result does
/// not depend on the belief, but callers re-evaluate it every slot so
/// time-varying goal weights take effect immediately.
pub fn select_sensing(g: &GoalParams, p: &SensingParams) -> SubcarrierAllocation {
    let mut best = SubcarrierAllocation(1);
    let mut best_cost = f64::INFINITY;
    for k in 1..=p.k_total {
        let candidate = SubcarrierAllocation(k);
        let cost = sensing_cost(candidate, g, p);
        if cost < best_cost {
            best = candidate;
            best_cost = cost;
        }
    }
    best
}

/// Plan both actions for the current slot.
pub fn plan(
    m: &ModelParams,
    g: &GoalParams,
    p: &SensingParams,
    belief: &StateBelief,
    x_desired_next: &UavState,
) -> Result<PlannedAction> {
    let cp = control_posterior(m, g, belief, x_desired_next)?;
    Ok(PlannedAction { u: select_control(&cp), k_next: select_sensing(g, p) })
}
