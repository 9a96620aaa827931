//! Soft actor-critic with twin critics, a tanh-squashed Gaussian policy,
//! learned temperature, uniform replay and average-reward targets.

mod agent;
mod critic;
mod policy;
mod replay;
mod reward;
mod train;
mod tuner;

pub use agent::{streams, Act, AgentConfig, ExplorerConfig, SacAgent, UpdateStats};
pub use critic::{critic_input, CriticEval};
pub use policy::{GaussianPolicy, PolicySample};
pub use replay::{Batch, ReplayBuffer, Transition};
pub use reward::RewardTracker;
pub use train::{train_loop, StepRecord, Trainer};
pub use tuner::EntropyTuner;
