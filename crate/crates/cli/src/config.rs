//! Training configuration files: strict JSON schema with defaults.

use std::path::Path;

use amrbench_core::env::{BarrierKind, EnvConfig, FeatureSet, InitMode};
use amrbench_core::rl::TrainConfig;
use serde::{Deserialize, Serialize};

use crate::cases::ExperimentCase;
use crate::CliError;

/// On-disk training specification. Unknown keys are rejected so typos cannot
/// silently fall back to defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSpec {
    pub case: String,
    /// Oscillation count for the generalization case.
    #[serde(default)]
    pub sin_modes: Option<u32>,
    #[serde(default)]
    pub p_order: Option<usize>,
    pub max_cells: usize,
    #[serde(default)]
    pub n_roots: Option<usize>,
    pub total_steps: usize,
    pub seed: u64,

    #[serde(default = "default_cost_weight")]
    pub cost_weight: f64,
    #[serde(default = "default_barrier")]
    pub barrier: String,
    #[serde(default = "default_init")]
    pub init: String,
    #[serde(default = "default_episode_len")]
    pub episode_len: usize,
    #[serde(default = "default_overrun_penalty")]
    pub overrun_penalty: f64,
    #[serde(default = "default_patience")]
    pub do_nothing_patience: usize,
    #[serde(default = "default_unsteady_step_prob")]
    pub unsteady_step_prob: f64,
    #[serde(default = "default_features")]
    pub features: String,
    /// Max refinements drawn for random episode initialization.
    #[serde(default)]
    pub random_init_depth: Option<usize>,

    #[serde(default = "default_discount")]
    pub discount: f64,
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_buffer_capacity")]
    pub buffer_capacity: usize,
    #[serde(default = "default_target_sync_every")]
    pub target_sync_every: usize,
    #[serde(default = "default_warmup_steps")]
    pub warmup_steps: usize,
    #[serde(default = "default_eps_start")]
    pub eps_start: f64,
    #[serde(default = "default_eps_end")]
    pub eps_end: f64,
    #[serde(default = "default_eps_decay_frac")]
    pub eps_decay_frac: f64,
    #[serde(default = "default_eval_every")]
    pub eval_every: usize,
    #[serde(default = "default_eval_episodes")]
    pub eval_episodes: usize,
    #[serde(default)]
    pub split_mode: bool,
    #[serde(default = "default_weight_decay")]
    pub weight_decay: f64,
}

fn default_cost_weight() -> f64 {
    25.0
}
fn default_barrier() -> String {
    "sqrt".into()
}
fn default_init() -> String {
    "random".into()
}
fn default_episode_len() -> usize {
    200
}
fn default_overrun_penalty() -> f64 {
    -1e3
}
fn default_patience() -> usize {
    10
}
fn default_unsteady_step_prob() -> f64 {
    0.1
}
fn default_features() -> String {
    "none".into()
}
fn default_discount() -> f64 {
    0.99
}
fn default_lr() -> f64 {
    1e-3
}
fn default_batch_size() -> usize {
    64
}
fn default_buffer_capacity() -> usize {
    50_000
}
fn default_target_sync_every() -> usize {
    1_000
}
fn default_warmup_steps() -> usize {
    1_000
}
fn default_eps_start() -> f64 {
    1.0
}
fn default_eps_end() -> f64 {
    0.05
}
fn default_eps_decay_frac() -> f64 {
    0.2
}
fn default_eval_every() -> usize {
    5_000
}
fn default_eval_episodes() -> usize {
    5
}
fn default_weight_decay() -> f64 {
    1e-4
}

impl TrainSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        // serde_json errors carry line/column diagnostics.
        let spec: TrainSpec = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.case()?;
        self.barrier_kind()?;
        self.init_mode()?;
        self.feature_set()?;
        let env = self.env_config()?;
        env.validate().map_err(CliError::Config)?;
        self.train_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn case(&self) -> Result<ExperimentCase, CliError> {
        ExperimentCase::parse(&self.case, self.sin_modes)
    }

    pub fn p_order(&self) -> Result<usize, CliError> {
        Ok(self.p_order.unwrap_or(self.case()?.default_p_order()))
    }

    fn barrier_kind(&self) -> Result<BarrierKind, CliError> {
        self.barrier.parse().map_err(CliError::Config)
    }

    fn init_mode(&self) -> Result<InitMode, CliError> {
        match self.init.as_str() {
            "coarse" => Ok(InitMode::Coarse),
            "random" => Ok(InitMode::Random),
            other => Err(CliError::Config(format!("unknown init mode '{other}'"))),
        }
    }

    fn feature_set(&self) -> Result<FeatureSet, CliError> {
        match self.features.as_str() {
            "none" => Ok(FeatureSet::None),
            "advection_speed" => Ok(FeatureSet::AdvectionSpeed),
            other => Err(CliError::Config(format!("unknown feature set '{other}'"))),
        }
    }

    pub fn env_config(&self) -> Result<EnvConfig, CliError> {
        let case = self.case()?;
        let mut config = EnvConfig::new(
            self.max_cells,
            self.n_roots.unwrap_or(case.default_n_roots()),
            self.p_order()?,
        );
        config.cost_weight = self.cost_weight;
        config.barrier = self.barrier_kind()?;
        config.init = self.init_mode()?;
        config.episode_len = self.episode_len;
        config.overrun_penalty = self.overrun_penalty;
        config.do_nothing_patience = self.do_nothing_patience;
        config.unsteady_step_prob = self.unsteady_step_prob;
        config.features = self.feature_set()?;
        config.random_init_depth = self.random_init_depth;
        Ok(config)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            total_steps: self.total_steps,
            discount: self.discount,
            lr: self.lr,
            batch_size: self.batch_size,
            buffer_capacity: self.buffer_capacity,
            target_sync_every: self.target_sync_every,
            warmup_steps: self.warmup_steps,
            eps_start: self.eps_start,
            eps_end: self.eps_end,
            eps_decay_frac: self.eps_decay_frac,
            eval_every: self.eval_every,
            eval_episodes: self.eval_episodes,
            seed: self.seed,
            split_mode: self.split_mode,
            weight_decay: self.weight_decay,
            hidden_dims: vec![64, 64],
        }
    }

    /// Stable fingerprint of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("spec serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canonical.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        format!("{h:016x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "case": "steady-adv",
            "max_cells": 25,
            "total_steps": 100,
            "seed": 1
        })
    }

    #[test]
    fn minimal_spec_parses_with_defaults() {
        let spec: TrainSpec = serde_json::from_value(minimal_json()).unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.cost_weight, 25.0);
        assert_eq!(spec.episode_len, 200);
        assert_eq!(spec.p_order().unwrap(), 3);
        let env = spec.env_config().unwrap();
        assert_eq!(env.n_roots, 4);
        assert_eq!(env.barrier, BarrierKind::Sqrt);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut v = minimal_json();
        v["max_cellz"] = serde_json::json!(30);
        let err = serde_json::from_value::<TrainSpec>(v).unwrap_err();
        assert!(err.to_string().contains("max_cellz"));
    }

    #[test]
    fn invalid_values_are_rejected() {
        let mut v = minimal_json();
        v["barrier"] = serde_json::json!("cubic");
        let spec: TrainSpec = serde_json::from_value(v).unwrap();
        assert!(spec.validate().is_err());

        let mut v = minimal_json();
        v["max_cells"] = serde_json::json!(2);
        let spec: TrainSpec = serde_json::from_value(v).unwrap();
        assert!(spec.validate().is_err(), "budget below the initial cell count");
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a: TrainSpec = serde_json::from_value(minimal_json()).unwrap();
        let b: TrainSpec = serde_json::from_value(minimal_json()).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut v = minimal_json();
        v["seed"] = serde_json::json!(2);
        let c: TrainSpec = serde_json::from_value(v).unwrap();
        assert_ne!(a.hash(), c.hash());
    }
}
