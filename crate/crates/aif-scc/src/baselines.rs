//! Comparison policies: greedy control and random sensing.
//!
//! Both baselines replace exactly one half of the planner and keep the
//! other half unchanged. Greedy control steers the estimated state straight
//! at the desired next state by unweighted least squares, ignoring belief
//! uncertainty and control effort, while keeping the planned sensing
//! allocation. Random sensing draws the allocation from the Gaussian prior
//! `N(0, alpha^-1)` instead of minimizing the sensing cost, while keeping
//! the planned control.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::gaussian::{spd_inverse, StateVector};
use crate::model::{ControlInput, ModelParams, UavState};
use crate::objective::GoalParams;
use crate::sensing::{SensingParams, SubcarrierAllocation};
use crate::Error;

/// Which policy drives the closed loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Planned control and planned sensing.
    Aif,
    /// Least-squares control toward the desired state; planned sensing.
    GreedyControl,
    /// Planned control; sensing drawn from the Gaussian prior.
    RandomSensing,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] =
        [PolicyKind::Aif, PolicyKind::GreedyControl, PolicyKind::RandomSensing];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Aif => "aif",
            PolicyKind::GreedyControl => "greedy",
            PolicyKind::RandomSensing => "random",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "aif" => Ok(PolicyKind::Aif),
            "greedy" | "greedy_control" => Ok(PolicyKind::GreedyControl),
            "random" | "random_sensing" => Ok(PolicyKind::RandomSensing),
            other => Err(Error::Config(format!(
                "unknown policy {other:?} (expected aif, greedy, or random)"
            ))),
        }
    }
}

/// Steer the estimated state directly at the desired next state:
/// the least-squares solution `u = (B^T B)^-1 B^T (x_desired_next - A m)`.
pub fn greedy_control(
    m: &ModelParams,
    belief_mean: &StateVector,
    x_desired_next: &UavState,
) -> ControlInput {
    let discrepancy = x_desired_next.as_vector() - m.a * belief_mean;
    let normal = spd_inverse(&(m.b.transpose() * m.b))
        .expect("B^T B is SPD for any dt > 0");
    ControlInput::from_vector(&(normal * (m.b.transpose() * discrepancy)))
}

/// Draw a sensing allocation from the Gaussian prior `N(0, alpha^-1)`:
/// `clamp(round(|z|), 1, K)`.
pub fn random_sensing<R: Rng>(
    rng: &mut R,
    g: &GoalParams,
    p: &SensingParams,
) -> SubcarrierAllocation {
    let std = g.alpha.sqrt().recip();
    let z: f64 = Normal::new(0.0, std).expect("validated alpha").sample(rng);
    let k = (z.abs().round() as usize).clamp(1, p.k_total);
    SubcarrierAllocation(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{substream, symmetrize, StateBelief, StateMatrix};
    use crate::model::make_model;
    use crate::planner::control_posterior;

    fn model() -> ModelParams {
        make_model(0.1, [1e-2, 1e-3, 1e-2, 1e-3]).unwrap()
    }

    #[test]
    fn policy_names_round_trip() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.name().parse::<PolicyKind>().unwrap(), kind);
        }
        assert!("lqg".parse::<PolicyKind>().is_err());
        assert_eq!(serde_json::to_string(&PolicyKind::GreedyControl).unwrap(), "\"greedy_control\"");
    }

    #[test]
    fn on_target_greedy_control_is_zero() {
        let m = model();
        let mean = StateVector::new(50.0, 0.0, 5.0, 0.1);
        let desired = UavState::from_vector(&(m.a * mean));
        let u = greedy_control(&m, &mean, &desired);
        assert!(u.as_vector().amax() < 1e-12);
    }

    #[test]
    fn greedy_residual_is_orthogonal_to_the_input_directions() {
        let m = model();
        let mut rng = substream(3, 0);
        for _ in 0..200 {
            let mean = StateVector::from_fn(|_, _| rng.gen_range(-50.0..50.0));
            let desired = UavState::new(
                rng.gen_range(-50.0..50.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-1.0..1.0),
            );
            let u = greedy_control(&m, &mean, &desired);
            let residual = desired.as_vector() - m.a * mean - m.b * u.as_vector();
            assert!((m.b.transpose() * residual).amax() < 1e-9);
        }
    }

    #[test]
    fn greedy_control_is_affine_in_the_discrepancy() {
        let m = model();
        let mean = StateVector::new(10.0, 0.5, 1.0, 0.0);
        let base = m.a * mean;
        let offset = StateVector::new(3.0, -0.2, 1.0, 0.1);
        let u1 = greedy_control(&m, &mean, &UavState::from_vector(&(base + offset)));
        let u2 = greedy_control(&m, &mean, &UavState::from_vector(&(base + 2.0 * offset)));
        assert!((u2.as_vector() - 2.0 * u1.as_vector()).amax() < 1e-9);
    }

    #[test]
    fn greedy_is_the_planner_limit_without_uncertainty_or_effort_terms() {
        let mut m = model();
        m.q = StateMatrix::identity() * 1e-12;
        let g = GoalParams {
            q_goal_diag: [1e6; 4],
            r_goal_diag: [1e-9; 2],
            ..GoalParams::default()
        };
        let belief = StateBelief::new(
            StateVector::new(80.0, 0.3, 4.0, 0.12),
            StateMatrix::identity() * 1e-12,
        );
        let desired = UavState::new(50.0, 0.5, 5.0, 0.1);
        let planned = control_posterior(&m, &g, &belief, &desired).unwrap().mean;
        let greedy = greedy_control(&m, &belief.mean, &desired).as_vector();
        assert!((planned - greedy).norm() / greedy.norm() < 1e-3, "{planned:?} vs {greedy:?}");
    }

    #[test]
    fn random_sensing_respects_allocation_bounds() {
        let g = GoalParams::default();
        let p = SensingParams::default();
        let mut rng = substream(11, 3);
        for _ in 0..10_000 {
            let k = random_sensing(&mut rng, &g, &p).get();
            assert!((1..=p.k_total).contains(&k));
        }
    }

    #[test]
    fn degenerate_prior_always_allocates_one() {
        let g = GoalParams { alpha: 1e9, ..GoalParams::default() };
        let p = SensingParams::default();
        let mut rng = substream(11, 3);
        for _ in 0..100 {
            assert_eq!(random_sensing(&mut rng, &g, &p).get(), 1);
        }
    }

    #[test]
    fn random_sensing_is_deterministic_per_seed() {
        let g = GoalParams::default();
        let p = SensingParams::default();
        let draw = |seed: u64| {
            let mut rng = substream(seed, 3);
            (0..50).map(|_| random_sensing(&mut rng, &g, &p).get()).collect::<Vec<_>>()
        };
        assert_eq!(draw(4), draw(4));
        assert_ne!(draw(4), draw(5));
    }

    #[test]
    fn random_sensing_tail_masses_match_the_prior() {
        // With alpha = 1e-3 the prior std is 31.62; the clamp maps
        // |z| >= 63.5 to 64 and |z| < 1.5 to 1, with known probabilities
        // from the normal CDF.
        let g = GoalParams::default();
        let p = SensingParams::default();
        let mut rng = substream(100, 3);
        let n = 100_000;
        let mut at_max = 0usize;
        let mut at_min = 0usize;
        for _ in 0..n {
            match random_sensing(&mut rng, &g, &p).get() {
                64 => at_max += 1,
                1 => at_min += 1,
                _ => {}
            }
        }
        let frac_max = at_max as f64 / n as f64;
        let frac_min = at_min as f64 / n as f64;
        assert!((frac_max - 0.044638).abs() < 0.005, "P(k=64) ~ {frac_max}");
        assert!((frac_min - 0.037833).abs() < 0.005, "P(k=1) ~ {frac_min}");
    }

    #[test]
    fn greedy_limit_stays_away_from_the_default_planner() {
        // Sanity check that the limit test above is meaningful: with the
        // default weights the two rules genuinely differ.
        let m = model();
        let g = GoalParams::default();
        let belief =
            StateBelief::new(StateVector::new(80.0, 0.3, 4.0, 0.12), StateMatrix::identity());
        let desired = UavState::new(50.0, 0.5, 5.0, 0.1);
        let planned = control_posterior(&m, &g, &belief, &desired).unwrap().mean;
        let greedy = greedy_control(&m, &belief.mean, &desired).as_vector();
        assert!((planned - greedy).norm() / greedy.norm() > 0.5);
    }

    #[test]
    fn greedy_matches_direct_normal_equations() {
        let m = model();
        let mean = StateVector::new(60.0, 0.4, 2.0, 0.05);
        let desired = UavState::new(55.0, 0.6, 3.0, 0.08);
        let u = greedy_control(&m, &mean, &desired).as_vector();
        let bt_b = symmetrize(&(m.b.transpose() * m.b));
        let rhs = m.b.transpose() * (desired.as_vector() - m.a * mean);
        let direct = bt_b.try_inverse().unwrap() * rhs;
        assert!((u - direct).amax() < 1e-12);
    }
}
