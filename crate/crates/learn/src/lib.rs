//! Learned edge-addition agents: a structure2vec Q-network trained by DQN,
//! and a supervised robustness regressor.

pub mod agents;
pub mod error;
pub mod neural;

pub use error::{LearnError, Result};

/// Q-network in double precision.
pub type QNetwork = neural::NetworkParams<f64>;
/// Graph-level robustness regressor in double precision.
pub type Regressor = neural::RegressorParams<f64>;
