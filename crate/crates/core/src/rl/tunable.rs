//! Deployment-time tunable policy: learned action values plus a closed-form
//! resource-cost term whose weight is chosen at query time, no retraining.

use crate::env::{barrier, Action, BarrierKind, Observation, Policy};

use super::net::{argmax_action, QNetwork};

/// Everything needed to evaluate the known cost term from an observation.
#[derive(Debug, Clone, Copy)]
pub struct KnownCostParams {
    pub barrier: BarrierKind,
    pub max_cells: usize,
}

/// Closed-form greedy cost value of an action: the immediate barrier change
/// scaled by `cost_weight`, with the usage delta of a single 1D bisection
/// (one cell gained on refine, one lost on coarsen, floored at one cell).
pub fn known_q(
    obs: &Observation,
    action: Action,
    cost_weight: f64,
    params: &KnownCostParams,
) -> f64 {
    if action == Action::DoNothing || cost_weight == 0.0 {
        return 0.0;
    }
    let p = obs.usage();
    let delta = 1.0 / params.max_cells as f64;
    let p_after = match action {
        Action::Refine => p + delta,
        Action::Coarsen => (p - delta).max(delta),
        Action::DoNothing => unreachable!(),
    };
    let b_before = barrier(p, params.barrier).expect("usage must be in the barrier domain");
    let b_after = barrier(p_after, params.barrier).expect("usage must be in the barrier domain");
    -cost_weight * (b_after - b_before)
}

/// Plain greedy wrapper over a Q-network.
#[derive(Debug, Clone)]
pub struct GreedyPolicy(pub QNetwork);

impl Policy for GreedyPolicy {
    fn act(&self, obs: &Observation) -> Action {
        self.0
            .greedy_action(obs.as_slice())
            .expect("observation layout fixed at deployment")
    }
}

/// Learned value plus known cost; `cost_weight` may differ from training.
#[derive(Debug, Clone)]
pub struct TunablePolicy {
    pub learned: QNetwork,
    pub known: KnownCostParams,
    pub cost_weight: f64,
}

impl TunablePolicy {
    pub fn act_with_weight(&self, obs: &Observation, cost_weight: f64) -> Action {
        let mut q = self
            .learned
            .forward(obs.as_slice())
            .expect("observation layout fixed at deployment");
        for (i, qi) in q.iter_mut().enumerate() {
            let action = Action::from_index(i).unwrap();
            *qi += known_q(obs, action, cost_weight, &self.known);
        }
        argmax_action(&q)
    }
}

impl Policy for TunablePolicy {
    fn act(&self, obs: &Observation) -> Action {
        self.act_with_weight(obs, self.cost_weight)
    }
}
