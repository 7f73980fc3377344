//! DQN and supervised agents for the edge-addition environment.

mod dataset;
mod dqn;
mod replay;
mod schedule;
mod sl;

pub use dataset::DatasetSplit;
pub use dqn::{
    act_greedy, evaluate_greedy, td_targets, train_dqn, DqnOutcome, DqnTrainer, GreedyQPolicy,
    LogPoint, StepReport,
};
pub use replay::{ReplayBuffer, Transition};
pub use schedule::{epsilon_at, TrainSchedule};
pub use sl::{
    act_sl, build_pairs, fit_regressor, sl_scores, train_sl, SlLogPoint, SlOutcome, SlSelector,
};
