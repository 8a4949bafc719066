//! Experiment configuration: one JSON file with per-key defaults, echoed
//! into every output for provenance.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::PolicyKind;
use crate::gaussian::{StateBelief, StateMatrix, StateVector};
use crate::model::{make_model, UavState};
use crate::objective::GoalParams;
use crate::sensing::{SensingParams, SubcarrierAllocation};
use crate::sim::EpisodeConfig;
use crate::{Error, Result};

fn default_dt() -> f64 {
    0.1
}
fn default_horizon() -> usize {
    628
}
fn default_q_diag() -> [f64; 4] {
    [1e-2, 1e-3, 1e-2, 1e-3]
}
fn default_policy() -> PolicyKind {
    PolicyKind::Aif
}
fn default_seed() -> u64 {
    1
}
fn default_initial_state() -> [f64; 4] {
    [100.0, 0.0, 5.0, 0.1]
}
fn default_initial_belief_cov_diag() -> [f64; 4] {
    [1.0; 4]
}
fn default_compare_seeds() -> Vec<u64> {
    (1..=20).collect()
}
fn default_sweep_alphas() -> Vec<f64> {
    vec![1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1]
}
fn default_sweep_seeds() -> Vec<u64> {
    (1..=20).collect()
}

/// Everything the CLI experiments need, with every key optional in the
/// file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Sampling interval (s).
    pub dt: f64,
    /// Episode length in slots.
    pub horizon_steps: usize,
    /// Diagonal of the process-noise covariance.
    pub q_diag: [f64; 4],
    pub sensing: SensingParams,
    pub goals: GoalParams,
    pub policy: PolicyKind,
    pub seed: u64,
    pub initial_state: [f64; 4],
    /// Initial belief mean; the true initial state when omitted.
    pub initial_belief_mean: Option<[f64; 4]>,
    pub initial_belief_cov_diag: [f64; 4],
    /// Allocation for the first observation; full allocation when omitted.
    pub initial_k: Option<usize>,
    /// Suppress process and measurement noise draws.
    pub zero_noise: bool,
    /// Seeds shared by all policies in the comparison experiment.
    pub compare_seeds: Vec<u64>,
    /// Occupancy weights visited by the trade-off sweep.
    pub sweep_alphas: Vec<f64>,
    /// Seeds averaged per sweep point.
    pub sweep_seeds: Vec<u64>,
    /// Where output files go; falls back to `$AIF_SCC_OUT`, then `out`.
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            horizon_steps: default_horizon(),
            q_diag: default_q_diag(),
            sensing: SensingParams::default(),
            goals: GoalParams::default(),
            policy: default_policy(),
            seed: default_seed(),
            initial_state: default_initial_state(),
            initial_belief_mean: None,
            initial_belief_cov_diag: default_initial_belief_cov_diag(),
            initial_k: None,
            zero_noise: false,
            compare_seeds: default_compare_seeds(),
            sweep_alphas: default_sweep_alphas(),
            sweep_seeds: default_sweep_seeds(),
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    /// Read and validate a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 {
            return Err(Error::NonPositive { name: "dt", value: self.dt });
        }
        if self.horizon_steps == 0 {
            return Err(Error::Config("horizon_steps must be >= 1".into()));
        }
        self.sensing.validate()?;
        self.goals.validate()?;
        for &q in &self.q_diag {
            if q <= 0.0 {
                return Err(Error::NonPositive { name: "q_diag entry", value: q });
            }
        }
        for &v in &self.initial_belief_cov_diag {
            if v <= 0.0 {
                return Err(Error::NonPositive { name: "initial_belief_cov_diag entry", value: v });
            }
        }
        if let Some(k) = self.initial_k {
            SubcarrierAllocation::new(k, &self.sensing)?;
        }
        if self.compare_seeds.is_empty() {
            return Err(Error::Config("compare_seeds must not be empty".into()));
        }
        if self.sweep_seeds.is_empty() {
            return Err(Error::Config("sweep_seeds must not be empty".into()));
        }
        if self.sweep_alphas.is_empty() {
            return Err(Error::Config("sweep_alphas must not be empty".into()));
        }
        for pair in self.sweep_alphas.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Config(
                    "sweep_alphas must be strictly ascending".into(),
                ));
            }
        }
        if self.sweep_alphas[0] <= 0.0 {
            return Err(Error::Config("sweep_alphas must be strictly positive".into()));
        }
        Ok(())
    }

    /// Build the runtime episode description.
    pub fn episode(&self) -> Result<EpisodeConfig> {
        self.validate()?;
        let model = make_model(self.dt, self.q_diag)?;
        let initial_state = UavState::new(
            self.initial_state[0],
            self.initial_state[1],
            self.initial_state[2],
            self.initial_state[3],
        );
        let mean = self.initial_belief_mean.unwrap_or(self.initial_state);
        let initial_belief = StateBelief::new(
            StateVector::from_row_slice(&mean),
            StateMatrix::from_diagonal(&StateVector::from_row_slice(&self.initial_belief_cov_diag)),
        );
        let initial_k =
            SubcarrierAllocation::new(self.initial_k.unwrap_or(self.sensing.k_total), &self.sensing)?;
        Ok(EpisodeConfig {
            model,
            sensing: self.sensing,
            goals: self.goals,
            policy: self.policy,
            horizon_steps: self.horizon_steps,
            seed: self.seed,
            initial_state,
            initial_belief,
            initial_k,
            zero_noise: self.zero_noise,
        })
    }

    /// Resolve the output directory: explicit flag, then config key, then
    /// the `AIF_SCC_OUT` environment variable, then `out`.
    pub fn resolve_output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(dir) = flag {
            return dir.to_path_buf();
        }
        if let Some(dir) = &self.output_dir {
            return dir.clone();
        }
        if let Ok(dir) = std::env::var("AIF_SCC_OUT") {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        PathBuf::from("out")
    }
}
