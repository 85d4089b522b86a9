//! DQN training loop: epsilon-greedy rollout, replay, target bootstrapping,
//! Adam updates, and periodic best-checkpoint retention.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Action, Environment};

use super::net::{backward, BatchItem, Gradients, QNetwork};
use super::replay::{ReplayBuffer, Transition};
use super::RlError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub total_steps: usize,
    /// Time discount factor of the return.
    pub discount: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub target_sync_every: usize,
    /// Stored transitions required before updates begin.
    pub warmup_steps: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Fraction of total steps over which epsilon anneals linearly.
    pub eps_decay_frac: f64,
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub seed: u64,
    /// Train the learned half of a separable action value: the environment's
    /// resource-cost weight is forced to zero for the whole run.
    pub split_mode: bool,
    /// Decoupled per-step weight decay; keeps extrapolation outside the
    /// visited observation range tame.
    pub weight_decay: f64,
    /// Hidden layer widths; empty yields a purely linear value function.
    pub hidden_dims: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            total_steps: 100_000,
            discount: 0.99,
            lr: 1e-3,
            batch_size: 64,
            buffer_capacity: 50_000,
            target_sync_every: 1_000,
            warmup_steps: 1_000,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay_frac: 0.2,
            eval_every: 5_000,
            eval_episodes: 5,
            seed: 0,
            split_mode: false,
            weight_decay: 1e-4,
            hidden_dims: vec![64, 64],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), RlError> {
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(RlError::BadConfig("discount must lie in [0, 1]".into()));
        }
        for eps in [self.eps_start, self.eps_end] {
            if !(0.0..=1.0).contains(&eps) {
                return Err(RlError::BadConfig("epsilon must lie in [0, 1]".into()));
            }
        }
        if self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return Err(RlError::BadConfig("buffer must hold at least one batch".into()));
        }
        if self.lr <= 0.0 {
            return Err(RlError::BadConfig("learning rate must be positive".into()));
        }
        if self.target_sync_every == 0 || self.eval_every == 0 {
            return Err(RlError::BadConfig("sync/eval periods must be positive".into()));
        }
        Ok(())
    }

    fn epsilon_at(&self, step: usize) -> f64 {
        let horizon = (self.eps_decay_frac * self.total_steps as f64).max(1.0);
        let frac = (step as f64 / horizon).min(1.0);
        self.eps_start + (self.eps_end - self.eps_start) * frac
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub step: usize,
    pub episode: usize,
    pub reward: f64,
    pub len: usize,
    pub epsilon: f64,
    pub loss_ma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub step: usize,
    pub eval_mean_reward: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainLog {
    pub episodes: Vec<EpisodeRecord>,
    pub checkpoints: Vec<CheckpointRecord>,
    /// Steps at which the target network was refreshed; between consecutive
    /// entries the bootstrap targets are computed from frozen weights.
    pub target_syncs: Vec<usize>,
    pub best_step: usize,
    pub best_eval_mean: f64,
    pub final_eval_mean: f64,
}

/// Per-parameter adaptive first-order optimizer (Adam) with decoupled
/// weight decay on the weights (biases are not decayed).
struct Adam {
    m: Gradients,
    v: Gradients,
    t: u64,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    weight_decay: f64,
}

impl Adam {
    fn new(net: &QNetwork, lr: f64, weight_decay: f64) -> Self {
        Self {
            m: Gradients::zeros_like(net),
            v: Gradients::zeros_like(net),
            t: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay,
        }
    }

    fn apply(&mut self, net: &mut QNetwork, grads: &Gradients) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        let (weights, biases) = net.params_mut();
        let groups = [
            (weights, &mut self.m.weights, &mut self.v.weights, &grads.weights, self.weight_decay),
            (biases, &mut self.m.biases, &mut self.v.biases, &grads.biases, 0.0),
        ];
        for (params, ms, vs, gs, decay) in groups {
            for ((p_vec, m_vec), (v_vec, g_vec)) in
                params.iter_mut().zip(ms.iter_mut()).zip(vs.iter_mut().zip(gs.iter()))
            {
                for k in 0..p_vec.len() {
                    let g = g_vec[k];
                    m_vec[k] = self.beta1 * m_vec[k] + (1.0 - self.beta1) * g;
                    v_vec[k] = self.beta2 * v_vec[k] + (1.0 - self.beta2) * g * g;
                    let m_hat = m_vec[k] / bc1;
                    let v_hat = v_vec[k] / bc2;
                    p_vec[k] -= self.lr * (m_hat / (v_hat.sqrt() + self.eps) + decay * p_vec[k]);
                }
            }
        }
    }
}

/// Bootstrap target `r + gamma * max_a Q_target(o', a)`, truncated at
/// terminal transitions.
pub fn td_target(
    target: &QNetwork,
    t: &super::replay::Transition,
    discount: f64,
) -> Result<f64, RlError> {
    let bootstrap = if t.done {
        0.0
    } else {
        let q_next = target.forward(&t.next_obs)?;
        q_next.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    };
    Ok(t.reward + discount * bootstrap)
}

fn mix_seed(master: u64, stream: u64, index: u64) -> u64 {
    // splitmix64 over a stream/index tagged master seed.
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mean greedy-episode reward over `episodes` fresh seeds.
pub fn evaluate_policy<E: Environment>(
    net: &QNetwork,
    env: &mut E,
    base_seed: u64,
    episodes: usize,
    max_steps: usize,
) -> f64 {
    let mut total = 0.0;
    for ep in 0..episodes {
        let mut obs = env.reset(mix_seed(base_seed, 7, ep as u64));
        let mut ep_reward = 0.0;
        for _ in 0..max_steps {
            let action = net.greedy_action(obs.as_slice()).expect("obs layout fixed");
            let out = env.step(action);
            ep_reward += out.reward.total;
            obs = out.obs;
            if out.done {
                break;
            }
        }
        total += ep_reward;
    }
    total / episodes.max(1) as f64
}

/// Train a Q-network on environments produced by `make_env`.
///
/// The factory receives a seed and must build an independent environment;
/// one instance drives training, a second runs the periodic greedy
/// evaluations whose best snapshot is returned.
pub fn train_dqn<E: Environment>(
    make_env: impl Fn(u64) -> E,
    config: &TrainConfig,
) -> Result<(QNetwork, TrainLog), RlError> {
    config.validate()?;
    let mut env = make_env(mix_seed(config.seed, 1, 0));
    let mut eval_env = make_env(mix_seed(config.seed, 2, 0));
    if config.split_mode {
        env.set_cost_weight(0.0);
        eval_env.set_cost_weight(0.0);
    }

    let obs_dim = env.obs_dim();
    let mut dims = vec![obs_dim];
    dims.extend_from_slice(&config.hidden_dims);
    dims.push(super::net::N_ACTIONS);
    let mut online = QNetwork::with_dims(&dims, mix_seed(config.seed, 3, 0));
    let mut target = online.clone();
    let mut adam = Adam::new(&online, config.lr, config.weight_decay);
    let mut buffer = ReplayBuffer::new(config.buffer_capacity);
    let mut rng = ChaCha12Rng::seed_from_u64(mix_seed(config.seed, 4, 0));

    let mut log = TrainLog::default();
    if config.total_steps == 0 {
        return Ok((online, log));
    }

    // Evaluation episodes must not outlive a stuck environment.
    let eval_cap = 10_000;

    let mut episode = 0usize;
    let mut ep_reward = 0.0;
    let mut ep_len = 0usize;
    let mut loss_ma = 0.0;
    let mut loss_seen = false;
    let mut obs = env.reset(mix_seed(config.seed, 5, episode as u64));

    let mut best: Option<(QNetwork, usize, f64)> = None;

    for step in 0..config.total_steps {
        let epsilon = config.epsilon_at(step);
        let action = if rng.random::<f64>() < epsilon {
            Action::from_index(rng.random_range(0..3)).unwrap()
        } else {
            online.greedy_action(obs.as_slice())?
        };
        let out = env.step(action);
        buffer.push(Transition {
            obs: obs.0.clone(),
            action: action.index(),
            reward: out.reward.total,
            next_obs: out.obs.0.clone(),
            done: out.done,
        });
        ep_reward += out.reward.total;
        ep_len += 1;

        if out.done {
            log.episodes.push(EpisodeRecord {
                step: step + 1,
                episode,
                reward: ep_reward,
                len: ep_len,
                epsilon,
                loss_ma,
            });
            episode += 1;
            ep_reward = 0.0;
            ep_len = 0;
            obs = env.reset(mix_seed(config.seed, 5, episode as u64));
        } else {
            obs = out.obs;
        }

        if buffer.len() >= config.warmup_steps.max(config.batch_size) {
            let batch = buffer.sample(&mut rng, config.batch_size);
            let mut targets = Vec::with_capacity(batch.len());
            for t in &batch {
                targets.push(td_target(&target, t, config.discount)?);
            }
            let items: Vec<BatchItem<'_>> = batch
                .iter()
                .map(|t| BatchItem { obs: &t.obs, action: t.action })
                .collect();
            let grads = backward(&online, &items, &targets);
            adam.apply(&mut online, &grads);

            let loss: f64 = items
                .iter()
                .zip(&targets)
                .map(|(item, &y)| {
                    let q = online.forward(item.obs).unwrap()[item.action];
                    (q - y) * (q - y)
                })
                .sum::<f64>()
                / items.len() as f64;
            loss_ma = if loss_seen { 0.99 * loss_ma + 0.01 * loss } else { loss };
            loss_seen = true;
        }

        if (step + 1) % config.target_sync_every == 0 {
            target = online.clone();
            log.target_syncs.push(step + 1);
        }

        let is_last = step + 1 == config.total_steps;
        if (step + 1) % config.eval_every == 0 || is_last {
            let mean = evaluate_policy(
                &online,
                &mut eval_env,
                mix_seed(config.seed, 6, (step + 1) as u64),
                config.eval_episodes,
                eval_cap,
            );
            log.checkpoints.push(CheckpointRecord { step: step + 1, eval_mean_reward: mean });
            if is_last {
                log.final_eval_mean = mean;
            }
            let improved = best.as_ref().map(|(_, _, b)| mean > *b).unwrap_or(true);
            if improved {
                best = Some((online.clone(), step + 1, mean));
            }
        }
    }

    let (net, best_step, best_eval) = best.expect("at least the final evaluation ran");
    log.best_step = best_step;
    log.best_eval_mean = best_eval;
    Ok((net, log))
}
