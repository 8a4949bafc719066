//! The closed sense, estimate, plan, actuate loop and batch execution over
//! seeds.
//!
//! One slot of the loop observes the true state through the sensing channel
//! with the allocation chosen in the previous slot, folds the measurement
//! into the belief, plans the control to apply now together with the
//! allocation for the next slot, charges both step costs, and advances the
//! true state. Noise comes from per-purpose substreams of the episode seed
//! so that two runs differing only in policy see identical process and
//! measurement realizations.

use crate::baselines::{greedy_control, random_sensing, PolicyKind};
use crate::estimator::estimate_step;
use crate::gaussian::{streams, substream, StateBelief};
use crate::model::{desired_state, step_truth, ControlInput, ModelParams, UavState};
use crate::objective::{control_cost, sensing_cost, GoalParams, StepCosts};
use crate::planner::{control_posterior, select_control, select_sensing};
use crate::sensing::{obs_covariance, observe, Observation, SensingParams, SubcarrierAllocation};
use crate::{Error, Result};

/// Everything one episode needs: system matrices, channel and goal
/// parameters, policy, horizon, seed, and initial conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub model: ModelParams,
    pub sensing: SensingParams,
    pub goals: GoalParams,
    pub policy: PolicyKind,
    pub horizon_steps: usize,
    pub seed: u64,
    pub initial_state: UavState,
    pub initial_belief: StateBelief,
    pub initial_k: SubcarrierAllocation,
    /// Suppress process and measurement noise draws while keeping the
    /// planner's and estimator's noise models unchanged.
    pub zero_noise: bool,
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon_steps == 0 {
            return Err(Error::Config("horizon_steps must be >= 1".into()));
        }
        self.sensing.validate()?;
        self.goals.validate()?;
        self.initial_belief.validate()?;
        if !self.initial_state.is_finite() {
            return Err(Error::Config("initial_state has non-finite entries".into()));
        }
        SubcarrierAllocation::new(self.initial_k.get(), &self.sensing)?;
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn with_policy(&self, policy: PolicyKind) -> Self {
        Self { policy, ..self.clone() }
    }
}

/// Everything logged about one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Slot index, starting at 1.
    pub t: usize,
    /// Elapsed time `t * dt` (s).
    pub time_s: f64,
    pub x_true: UavState,
    pub x_desired: UavState,
    /// Posterior mean after this slot's update.
    pub belief_mean: UavState,
    /// Posterior covariance after this slot's update.
    pub belief_cov: crate::gaussian::StateMatrix,
    /// Trace of the posterior covariance.
    pub belief_cov_trace: f64,
    pub y: Observation,
    /// Allocation the observation was taken with.
    pub k_used: SubcarrierAllocation,
    /// Control applied at the end of the slot.
    pub u: ControlInput,
    pub costs: StepCosts,
}

/// Complete log of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub records: Vec<StepRecord>,
    pub totals: StepCosts,
    pub config_echo: EpisodeConfig,
}

/// Run one episode of the closed loop.
///
/// Deterministic given the config (seed included). Numerical failures abort
/// the episode with the slot index attached.
pub fn run_episode(cfg: &EpisodeConfig) -> Result<EpisodeLog> {
    cfg.validate()?;

    let mut process_rng = substream(cfg.seed, streams::PROCESS);
    let mut measurement_rng = substream(cfg.seed, streams::MEASUREMENT);
    let mut policy_rng = substream(cfg.seed, streams::POLICY);

    let obs_params =
        SensingParams { zero_noise: cfg.sensing.zero_noise || cfg.zero_noise, ..cfg.sensing };

    let mut x_true = cfg.initial_state;
    let mut belief = cfg.initial_belief.clone();
    let mut u_prev = ControlInput::ZERO;
    let mut k = cfg.initial_k;
    let mut records = Vec::with_capacity(cfg.horizon_steps);
    let mut totals = StepCosts::default();

    for t in 1..=cfg.horizon_steps {
        let time_s = t as f64 * cfg.model.dt;

        let r = obs_covariance(k, &cfg.sensing);
        let y = observe(&x_true, k, &obs_params, &mut measurement_rng)
            .map_err(|e| e.at_step(t))?;

        belief = estimate_step(&cfg.model, &belief, &u_prev, &y, &r).map_err(|e| e.at_step(t))?;

        let x_desired = desired_state(time_s, &cfg.goals.traj);
        let x_desired_next = desired_state(time_s + cfg.model.dt, &cfg.goals.traj);
        let (u, k_next) = match cfg.policy {
            PolicyKind::Aif => {
                let cp = control_posterior(&cfg.model, &cfg.goals, &belief, &x_desired_next)
                    .map_err(|e| e.at_step(t))?;
                (select_control(&cp), select_sensing(&cfg.goals, &cfg.sensing))
            }
            PolicyKind::GreedyControl => (
                greedy_control(&cfg.model, &belief.mean, &x_desired_next),
                select_sensing(&cfg.goals, &cfg.sensing),
            ),
            PolicyKind::RandomSensing => {
                let cp = control_posterior(&cfg.model, &cfg.goals, &belief, &x_desired_next)
                    .map_err(|e| e.at_step(t))?;
                (
                    select_control(&cp),
                    random_sensing(&mut policy_rng, &cfg.goals, &cfg.sensing),
                )
            }
        };

        let costs = StepCosts {
            control: control_cost(&x_true, &x_desired, &u, &cfg.goals),
            sensing: sensing_cost(k, &cfg.goals, &cfg.sensing),
        };
        totals.control += costs.control;
        totals.sensing += costs.sensing;

        records.push(StepRecord {
            t,
            time_s,
            x_true,
            x_desired,
            belief_mean: UavState::from_vector(&belief.mean),
            belief_cov: belief.cov,
            belief_cov_trace: belief.cov.trace(),
            y,
            k_used: k,
            u,
            costs,
        });

        x_true = if cfg.zero_noise {
            cfg.model.step_deterministic(&x_true, &u)
        } else {
            step_truth(&cfg.model, &x_true, &u, &mut process_rng).map_err(|e| e.at_step(t))?
        };
        u_prev = u;
        k = k_next;
    }

    Ok(EpisodeLog { records, totals, config_echo: cfg.clone() })
}

/// Run one episode per seed, keeping results in seed order.
///
/// Episodes are independent, so with the `parallel` feature they execute on
/// the rayon thread pool; results are identical to the sequential path.
#[cfg(feature = "parallel")]
pub fn run_batch(base: &EpisodeConfig, seeds: &[u64]) -> Vec<Result<EpisodeLog>> {
    use rayon::prelude::*;
    seeds.par_iter().map(|&seed| run_episode(&base.with_seed(seed))).collect()
}

/// Run one episode per seed, keeping results in seed order.
#[cfg(not(feature = "parallel"))]
pub fn run_batch(base: &EpisodeConfig, seeds: &[u64]) -> Vec<Result<EpisodeLog>> {
    run_batch_sequential(base, seeds)
}

/// Single-threaded batch execution, available regardless of features; the
/// reference the parallel path is benchmarked and tested against.
pub fn run_batch_sequential(base: &EpisodeConfig, seeds: &[u64]) -> Vec<Result<EpisodeLog>> {
    seeds.iter().map(|&seed| run_episode(&base.with_seed(seed))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn standard(policy: PolicyKind, seed: u64) -> EpisodeConfig {
        let cfg = ExperimentConfig { policy, seed, ..Default::default() };
        cfg.episode().unwrap()
    }

    #[test]
    fn unit_horizon_produces_one_consistent_record() {
        let mut cfg = standard(PolicyKind::Aif, 1);
        cfg.horizon_steps = 1;
        let log = run_episode(&cfg).unwrap();
        assert_eq!(log.records.len(), 1);
        let rec = &log.records[0];
        assert_eq!(rec.t, 1);
        assert_eq!(rec.time_s, cfg.model.dt);
        assert_eq!(rec.k_used, cfg.initial_k);
        assert_eq!(log.totals, rec.costs);
    }

    #[test]
    fn episodes_are_deterministic_in_the_config() {
        let cfg = standard(PolicyKind::Aif, 3);
        let a = run_episode(&cfg).unwrap();
        let b = run_episode(&cfg).unwrap();
        assert_eq!(a, b);
        let c = run_episode(&cfg.with_seed(4)).unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn totals_equal_column_sums() {
        let cfg = standard(PolicyKind::RandomSensing, 8);
        let log = run_episode(&cfg).unwrap();
        let control: f64 = log.records.iter().map(|r| r.costs.control).sum();
        let sensing: f64 = log.records.iter().map(|r| r.costs.sensing).sum();
        assert!((log.totals.control - control).abs() <= 1e-9 * control.abs());
        assert!((log.totals.sensing - sensing).abs() <= 1e-9 * sensing.abs());
        assert_eq!(log.totals.total(), log.totals.control + log.totals.sensing);
    }

    #[test]
    fn planner_allocates_initial_k_then_half() {
        let cfg = standard(PolicyKind::Aif, 5);
        let log = run_episode(&cfg).unwrap();
        assert_eq!(log.records[0].k_used.get(), 64);
        assert!(log.records[1..].iter().all(|r| r.k_used.get() == 32));
    }

    #[test]
    fn earlier_records_do_not_depend_on_later_noise() {
        let long = standard(PolicyKind::Aif, 6);
        let mut short = long.clone();
        short.horizon_steps = 5;
        let full = run_episode(&long).unwrap();
        let prefix = run_episode(&short).unwrap();
        assert_eq!(prefix.records[..], full.records[..5]);
    }

    #[test]
    fn policies_share_noise_realizations_per_seed() {
        let aif = run_episode(&standard(PolicyKind::Aif, 7)).unwrap();
        let greedy = run_episode(&standard(PolicyKind::GreedyControl, 7)).unwrap();
        let k_aif: Vec<_> = aif.records.iter().map(|r| r.k_used).collect();
        let k_greedy: Vec<_> = greedy.records.iter().map(|r| r.k_used).collect();
        assert_eq!(k_aif, k_greedy);
        assert_ne!(
            aif.records.iter().map(|r| r.u).collect::<Vec<_>>(),
            greedy.records.iter().map(|r| r.u).collect::<Vec<_>>(),
        );
        // Identical measurement-noise draws: the first observation happens
        // before the policies diverge.
        assert_eq!(aif.records[0].y, greedy.records[0].y);
    }

    #[test]
    fn zero_noise_tracking_error_settles() {
        let mut cfg = standard(PolicyKind::Aif, 1);
        cfg.zero_noise = true;
        let log = run_episode(&cfg).unwrap();
        let err = |r: &StepRecord| (r.x_true.as_vector() - r.x_desired.as_vector()).norm();
        let initial = err(&log.records[0]);
        assert!(initial > 40.0, "starts 50 m off track");
        let tail: Vec<f64> = log.records.iter().rev().take(100).map(err).collect();
        let tail_max = tail.iter().cloned().fold(0.0, f64::max);
        assert!(tail_max < 5.0, "tail error {tail_max}");
        assert!(log.records.iter().all(|r| r.x_true.is_finite()));
    }

    #[test]
    fn batch_keeps_seed_order_and_isolation() {
        let base = standard(PolicyKind::Aif, 0);
        let logs = run_batch(&base, &[1, 2, 7, 7]);
        let logs: Vec<_> = logs.into_iter().map(|l| l.unwrap()).collect();
        assert_eq!(logs.len(), 4);
        for (log, seed) in logs.iter().zip([1, 2, 7, 7]) {
            assert_eq!(log.config_echo.seed, seed);
        }
        assert_ne!(logs[0].records, logs[1].records);
        assert_eq!(logs[2], logs[3]);
    }

    #[test]
    fn parallel_and_sequential_batches_agree() {
        let base = standard(PolicyKind::RandomSensing, 0);
        let seeds: Vec<u64> = (1..=8).collect();
        let par = run_batch(&base, &seeds);
        let seq = run_batch_sequential(&base, &seeds);
        for (p, s) in par.iter().zip(seq.iter()) {
            assert_eq!(p.as_ref().unwrap(), s.as_ref().unwrap());
        }
    }

    #[test]
    fn mean_cost_is_stable_across_disjoint_seed_batches() {
        let base = standard(PolicyKind::Aif, 0);
        let first: Vec<u64> = (1..=20).collect();
        let second: Vec<u64> = (21..=40).collect();
        let mean_total = |seeds: &[u64]| {
            let logs = run_batch(&base, seeds);
            logs.iter().map(|l| l.as_ref().unwrap().totals.total()).sum::<f64>()
                / seeds.len() as f64
        };
        let a = mean_total(&first);
        let b = mean_total(&second);
        assert!((a - b).abs() / a.abs() < 0.05, "{a} vs {b}");
    }

    #[test]
    fn invalid_configs_are_rejected_before_running() {
        let mut cfg = standard(PolicyKind::Aif, 1);
        cfg.horizon_steps = 0;
        assert!(matches!(run_episode(&cfg), Err(Error::Config(_))));

        let mut cfg = standard(PolicyKind::Aif, 1);
        cfg.initial_k = SubcarrierAllocation(65);
        assert!(run_episode(&cfg).is_err());
    }

    #[test]
    fn numerical_aborts_carry_the_step_index() {
        let err = Error::NotSpd { context: "spd_inverse" }.at_step(17);
        assert!(err.to_string().contains("step 17"));
    }
}
