//! Closed-loop sensing-communication-control (SCC) simulator for a UAV
//! tracked by a sensing base station.
//!
//! A base station localizes a UAV over an OFDM uplink, estimates its
//! kinematic state by Gaussian message passing (equivalent to a Kalman
//! recursion), and plans both the control input and the number of
//! subcarriers allocated to sensing by minimizing a goal-prior cost in
//! closed form. The crate provides:
//!
//! - [`gaussian`]: dense SPD linear algebra and Gaussian sampling kernel
//! - [`model`]: UAV dynamics, system matrices, desired trajectory
//! - [`sensing`]: CRLB-based ranging noise as a function of subcarriers
//! - [`objective`]: control/sensing costs and the goal-prior parameters
//! - [`estimator`]: belief update by message passing (information form)
//! - [`planner`]: closed-form control posterior and subcarrier selection
//! - [`baselines`]: greedy-control and random-sensing comparison policies
//! - [`sim`]: the closed loop, episode logs, seeded batch execution
//! - [`config`] / [`output`]: experiment configuration and CSV/JSON emission
//!
//! Batch execution (`sim::run_batch`) is data-parallel over seeds via rayon
//! when the default `parallel` feature is enabled; episodes are pure
//! functions of their config, so results are identical (byte-for-byte in
//! the CSV outputs) across thread counts and with the feature disabled.

pub mod baselines;
pub mod config;
pub mod estimator;
pub mod gaussian;
pub mod model;
pub mod objective;
pub mod output;
pub mod planner;
pub mod sensing;
pub mod sim;

pub use baselines::{greedy_control, random_sensing, PolicyKind};
pub use config::ExperimentConfig;
pub use estimator::{estimate_step, predict, update, PredictedBelief};
pub use gaussian::{sample_gaussian, spd_inverse, symmetrize, GaussianBelief};
pub use model::{desired_state, make_model, step_truth, ControlInput, ModelParams, TrajectoryParams, UavState};
pub use objective::{control_cost, cumulative_cost, goal_prior_log_density, sensing_cost, GoalParams, StepCosts};
pub use planner::{control_posterior, plan, select_control, select_sensing, PlannedAction};
pub use sensing::{obs_covariance, observe, ranging_variance, Observation, SensingParams, SubcarrierAllocation};
pub use sim::{run_batch, run_batch_sequential, run_episode, EpisodeConfig, EpisodeLog, StepRecord};

/// Errors surfaced by the numerical pipeline and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A covariance (or other matrix required to be SPD) failed its
    /// Cholesky factorization.
    #[error("matrix is not symmetric positive definite ({context})")]
    NotSpd {
        /// Which quantity was being factored.
        context: &'static str,
    },

    /// A parameter that must be strictly positive was not.
    #[error("{name} must be > 0 (got {value})")]
    NonPositive { name: &'static str, value: f64 },

    /// An aggregate over an empty sequence was requested.
    #[error("empty sequence")]
    EmptySequence,

    /// Bad experiment configuration (unreadable file, invalid JSON, or a
    /// value outside its documented range).
    #[error("config error: {0}")]
    Config(String),

    /// An output file could not be written.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A numerical failure inside an episode, tagged with the step at
    /// which it occurred.
    #[error("numerical failure at step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attach a step index to an episode-internal error.
    pub fn at_step(self, step: usize) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
