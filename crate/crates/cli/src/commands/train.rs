//! `train`: run DQN training from a JSON specification.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use amrbench_core::env::{Action, AmrEnv, Environment, Observation, StepOutcome, StepRecord};
use amrbench_core::rl::{save_model, train_dqn, ModelMeta, TrainLog};

use crate::config::TrainSpec;
use crate::report::write_jsonl;
use crate::CliError;

use super::ensure_out_dir;

pub struct TrainOutputs {
    pub model_path: PathBuf,
    pub log_path: PathBuf,
    pub log: TrainLog,
    pub meta: ModelMeta,
}

/// Environment wrapper that records every step for the episode trace log.
struct TracingEnv {
    inner: AmrEnv,
    sink: Arc<Mutex<Vec<StepRecord>>>,
}

impl Environment for TracingEnv {
    fn reset(&mut self, seed: u64) -> Observation {
        self.inner.reset(seed)
    }

    fn step(&mut self, action: Action) -> StepOutcome {
        let out = self.inner.step(action);
        if let Some(record) = self.inner.last_record() {
            self.sink.lock().expect("trace sink lock").push(record.clone());
        }
        out
    }

    fn obs_dim(&self) -> usize {
        self.inner.obs_dim()
    }

    fn set_cost_weight(&mut self, weight: f64) {
        self.inner.set_cost_weight(weight);
    }
}

pub fn cmd_train(
    config_path: &Path,
    out_dir: &Path,
    trace_episodes: bool,
) -> Result<TrainOutputs, CliError> {
    // Parse and validate everything before any output is created.
    let spec = TrainSpec::load(config_path)?;
    let case = spec.case()?;
    let env_config = spec.env_config()?;
    let train_config = spec.train_config();
    let problem = case.env_problem();

    let trace: Arc<Mutex<Vec<StepRecord>>> = Arc::new(Mutex::new(Vec::new()));
    let (net, log) = {
        let trace = trace.clone();
        let make_env = move |seed: u64| TracingEnv {
            inner: AmrEnv::new(problem.clone(), env_config.clone(), seed),
            sink: trace.clone(),
        };
        train_dqn(make_env, &train_config)
            .map_err(|e| CliError::Runtime(format!("training failed: {e}")))?
    };

    ensure_out_dir(out_dir)?;
    let meta = ModelMeta {
        obs_dim: spec.env_config()?.obs_dim(),
        obs_layout: Observation::layout_labels(&spec.env_config()?.features),
        split_mode: spec.split_mode,
        barrier: spec.barrier.clone(),
        max_cells: spec.max_cells,
        cost_weight: spec.cost_weight,
        config_hash: spec.hash(),
    };
    let model_path = out_dir.join("model.json");
    save_model(&net, &meta, &model_path)
        .map_err(|e| CliError::Runtime(format!("saving model: {e}")))?;

    let log_path = out_dir.join("train_log.jsonl");
    write_jsonl(&log_path, &log.episodes)?;
    write_jsonl(&out_dir.join("checkpoints.jsonl"), &log.checkpoints)?;
    if trace_episodes {
        let records = trace.lock().expect("trace sink lock");
        write_jsonl(&out_dir.join("episode_trace.jsonl"), &records)?;
    }
    Ok(TrainOutputs { model_path, log_path, log, meta })
}
