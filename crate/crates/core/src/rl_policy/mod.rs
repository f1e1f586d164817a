//! Autoregressive policy, PPO updates and the training loop that searches
//! over label sequences.

mod net;
mod ppo;
mod train;

pub use net::{sequence_space_size, PolicyNet, Trajectory};
pub use ppo::{categorical_entropy, clipped_term, mean_policy_entropy, ppo_gradient, ppo_objective, Adam, PpoSample};
pub use train::{train, IterationLog, TrainConfig, TrainState};
