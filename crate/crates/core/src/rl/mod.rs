//! From-scratch deep Q-learning: MLP with manual backpropagation, replay
//! buffer, target network, epsilon-greedy training, and a deployment-time
//! tunable policy that splits the action value into a learned part and a
//! closed-form resource-cost part.

mod io;
mod net;
mod replay;
mod train;
mod tunable;

pub use io::{load_model, save_model, FormatError, ModelMeta};
pub use net::{backward, BatchItem, Gradients, QNetwork, GRAD_CLIP_NORM, N_ACTIONS};
pub use replay::{ReplayBuffer, Transition};
pub use train::{
    evaluate_policy, td_target, train_dqn, CheckpointRecord, EpisodeRecord, TrainConfig,
    TrainLog,
};
pub use tunable::{known_q, GreedyPolicy, KnownCostParams, TunablePolicy};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RlError {
    #[error("observation has dimension {got}, network expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid training configuration: {0}")]
    BadConfig(String),
}
