//! Belief update over the UAV state, written in information form.
//!
//! The posterior over the current state combines the prediction through the
//! dynamics with the evidence carried by the measurement:
//!
//! ```text
//! W_t = (W_pred^-1 + C^T R^-1 C)^-1
//! m_t = W_t (C^T R^-1 y + W_pred^-1 m_pred)
//! ```
//!
//! which is the Kalman recursion with the update expressed through
//! precisions instead of a gain. Every covariance passes through
//! [`symmetrize`] so round-off never accumulates into asymmetry over long
//! episodes.

use crate::gaussian::{
    spd_inverse, symmetrize, MeasurementMatrix, ObsMatrix, StateBelief, StateMatrix, StateVector,
};
use crate::model::{ControlInput, ModelParams};
use crate::sensing::Observation;
use crate::Result;

/// Belief over the current state before the measurement is folded in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedBelief {
    pub mean: StateVector,
    pub cov: StateMatrix,
}

impl PredictedBelief {
    pub fn as_belief(&self) -> StateBelief {
        StateBelief::new(self.mean, self.cov)
    }
}

/// Push the previous posterior through the dynamics:
/// `m_pred = A m + B u`, `W_pred = A W A^T + Q`.
pub fn predict(m: &ModelParams, prior: &StateBelief, u_prev: &ControlInput) -> PredictedBelief {
    PredictedBelief {
        mean: m.a * prior.mean + m.b * u_prev.as_vector(),
        cov: symmetrize(&(m.a * prior.cov * m.a.transpose() + m.q)),
    }
}

/// Fold a measurement into the predicted belief (information form).
pub fn update(
    pred: &PredictedBelief,
    y: &Observation,
    c: &MeasurementMatrix,
    r: &ObsMatrix,
) -> Result<StateBelief> {
    let w_pred_inv = spd_inverse(&pred.cov)?;
    let r_inv = spd_inverse(r)?;
    let posterior_cov = spd_inverse(&symmetrize(&(w_pred_inv + c.transpose() * r_inv * c)))?;
    let posterior_mean =
        posterior_cov * (c.transpose() * (r_inv * y.as_vector()) + w_pred_inv * pred.mean);
    Ok(StateBelief::new(posterior_mean, posterior_cov))
}

/// One full estimation slot: predict with the applied control, then update
/// with the received measurement.
pub fn estimate_step(
    m: &ModelParams,
    prior: &StateBelief,
    u_prev: &ControlInput,
    y: &Observation,
    r: &ObsMatrix,
) -> Result<StateBelief> {
    update(&predict(m, prior, u_prev), y, &m.c, r)
}
