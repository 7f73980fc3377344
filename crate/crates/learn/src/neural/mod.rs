//! Structure2vec embeddings with two Q-heads, trained without an ML framework.
//!
//! Node embeddings run `K` synchronous rounds of
//! `mu_v <- relu(theta1 x_v + theta2 * sum_{u in N(v)} mu_u)` from zero, and
//! the graph embedding is the sum of node embeddings. The Q-value of selecting
//! node `a` is `theta3 relu(theta4 [mu_a, mu_G])` when no edge stub is pending
//! and `theta5 relu(theta6 [mu_stub, mu_a, mu_G])` otherwise. No biases.

mod adam;
pub mod checkpoint;
mod qnet;
mod regressor;
mod s2v;

use ndarray::{Array2, LinalgScalar, ScalarOperand};
use netrobust_core::Scalar;
use rand::Rng;

use crate::error::{LearnError, Result};

pub use adam::{adam_step, AdamState};
pub use qnet::{grad_td_loss, q_values, q_values_for, LossAndGrad, TdSample};
pub use regressor::{grad_mse, mse};
pub use s2v::{embed, node_features, Embedding};

/// Float type usable by the network: f32 or f64.
pub trait NetScalar: Scalar + LinalgScalar + ScalarOperand {}

impl<T: Scalar + LinalgScalar + ScalarOperand> NetScalar for T {}

/// Network widths and message-passing depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetConfig {
    pub embed_dim: usize,
    pub hidden: usize,
    pub rounds: usize,
}

impl NetConfig {
    /// Synthetic-graph setting: d = 64, h = 128, K = 3.
    pub const SYNTHETIC: Self = Self {
        embed_dim: 64,
        hidden: 128,
        rounds: 3,
    };
    /// Real-world setting: d = 64, h = 32, K = 5.
    pub const REAL_WORLD: Self = Self {
        embed_dim: 64,
        hidden: 32,
        rounds: 5,
    };

    pub fn validate(&self) -> Result<()> {
        if self.embed_dim == 0 || self.hidden == 0 || self.rounds == 0 {
            return Err(LearnError::InvalidConfig(format!(
                "network sizes must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

impl Default for NetConfig {
    fn default() -> Self {
        Self::SYNTHETIC
    }
}

/// A named, fixed list of weight matrices.
pub trait Parameters<T>: Clone {
    /// Tag distinguishing parameter sets in checkpoints.
    const KIND: u8;

    /// All-zero parameters for `config`.
    fn zeroed(config: NetConfig) -> Self;
    fn config(&self) -> NetConfig;
    fn names(&self) -> &'static [&'static str];
    fn tensors(&self) -> Vec<&Array2<T>>;
    fn tensors_mut(&mut self) -> Vec<&mut Array2<T>>;
    /// Same shapes, all zeros.
    fn zeros_like(&self) -> Self {
        Self::zeroed(self.config())
    }

    fn num_weights(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn is_finite(&self) -> bool
    where
        T: NetScalar,
    {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|x| x.is_finite()))
    }

    /// `self += other`, tensor by tensor.
    fn accumulate(&mut self, other: &Self)
    where
        T: NetScalar,
    {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            *a += b;
        }
    }
}

fn glorot<T: NetScalar, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Array2<T> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || {
        T::from_f64_lossy(rng.random_range(-bound..bound))
    })
}

fn check_shape<T>(name: &str, t: &Array2<T>, rows: usize, cols: usize) -> Result<()> {
    if t.dim() != (rows, cols) {
        return Err(LearnError::ShapeMismatch(format!(
            "{name} is {:?}, expected ({rows}, {cols})",
            t.dim()
        )));
    }
    Ok(())
}

/// Q-network weights: a shared encoder and one head per stub phase.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams<T> {
    pub config: NetConfig,
    /// d x 2, node features.
    pub theta1: Array2<T>,
    /// d x d, neighbor aggregate.
    pub theta2: Array2<T>,
    /// 1 x h, stub-empty output.
    pub theta3: Array2<T>,
    /// h x 2d over `[mu_a, mu_G]`.
    pub theta4: Array2<T>,
    /// 1 x h, stub-set output.
    pub theta5: Array2<T>,
    /// h x 3d over `[mu_stub, mu_a, mu_G]`.
    pub theta6: Array2<T>,
}

const NETWORK_NAMES: [&str; 6] = ["theta1", "theta2", "theta3", "theta4", "theta5", "theta6"];

impl<T: NetScalar> NetworkParams<T> {
    pub fn zeros(config: NetConfig) -> Self {
        let (d, h) = (config.embed_dim, config.hidden);
        Self {
            config,
            theta1: Array2::zeros((d, 2)),
            theta2: Array2::zeros((d, d)),
            theta3: Array2::zeros((1, h)),
            theta4: Array2::zeros((h, 2 * d)),
            theta5: Array2::zeros((1, h)),
            theta6: Array2::zeros((h, 3 * d)),
        }
    }

    /// Glorot-uniform initialization: each matrix in `+-sqrt(6 / (fan_in + fan_out))`.
    pub fn glorot_init<R: Rng + ?Sized>(config: NetConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let (d, h) = (config.embed_dim, config.hidden);
        Ok(Self {
            config,
            theta1: glorot(d, 2, rng),
            theta2: glorot(d, d, rng),
            theta3: glorot(1, h, rng),
            theta4: glorot(h, 2 * d, rng),
            theta5: glorot(1, h, rng),
            theta6: glorot(h, 3 * d, rng),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let (d, h) = (self.config.embed_dim, self.config.hidden);
        check_shape("theta1", &self.theta1, d, 2)?;
        check_shape("theta2", &self.theta2, d, d)?;
        check_shape("theta3", &self.theta3, 1, h)?;
        check_shape("theta4", &self.theta4, h, 2 * d)?;
        check_shape("theta5", &self.theta5, 1, h)?;
        check_shape("theta6", &self.theta6, h, 3 * d)
    }
}

impl<T: NetScalar> Parameters<T> for NetworkParams<T> {
    const KIND: u8 = 0;

    fn zeroed(config: NetConfig) -> Self {
        Self::zeros(config)
    }

    fn config(&self) -> NetConfig {
        self.config
    }

    fn names(&self) -> &'static [&'static str] {
        &NETWORK_NAMES
    }

    fn tensors(&self) -> Vec<&Array2<T>> {
        vec![
            &self.theta1,
            &self.theta2,
            &self.theta3,
            &self.theta4,
            &self.theta5,
            &self.theta6,
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut Array2<T>> {
        vec![
            &mut self.theta1,
            &mut self.theta2,
            &mut self.theta3,
            &mut self.theta4,
            &mut self.theta5,
            &mut self.theta6,
        ]
    }
}

/// Graph-level regressor: the shared encoder followed by `w_out relu(w_hidden mu_G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorParams<T> {
    pub config: NetConfig,
    pub theta1: Array2<T>,
    pub theta2: Array2<T>,
    /// 1 x h.
    pub w_out: Array2<T>,
    /// h x d.
    pub w_hidden: Array2<T>,
}

const REGRESSOR_NAMES: [&str; 4] = ["theta1", "theta2", "w_out", "w_hidden"];

impl<T: NetScalar> RegressorParams<T> {
    pub fn zeros(config: NetConfig) -> Self {
        let (d, h) = (config.embed_dim, config.hidden);
        Self {
            config,
            theta1: Array2::zeros((d, 2)),
            theta2: Array2::zeros((d, d)),
            w_out: Array2::zeros((1, h)),
            w_hidden: Array2::zeros((h, d)),
        }
    }

    pub fn glorot_init<R: Rng + ?Sized>(config: NetConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let (d, h) = (config.embed_dim, config.hidden);
        Ok(Self {
            config,
            theta1: glorot(d, 2, rng),
            theta2: glorot(d, d, rng),
            w_out: glorot(1, h, rng),
            w_hidden: glorot(h, d, rng),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let (d, h) = (self.config.embed_dim, self.config.hidden);
        check_shape("theta1", &self.theta1, d, 2)?;
        check_shape("theta2", &self.theta2, d, d)?;
        check_shape("w_out", &self.w_out, 1, h)?;
        check_shape("w_hidden", &self.w_hidden, h, d)
    }
}

impl<T: NetScalar> Parameters<T> for RegressorParams<T> {
    const KIND: u8 = 1;

    fn zeroed(config: NetConfig) -> Self {
        Self::zeros(config)
    }

    fn config(&self) -> NetConfig {
        self.config
    }

    fn names(&self) -> &'static [&'static str] {
        &REGRESSOR_NAMES
    }

    fn tensors(&self) -> Vec<&Array2<T>> {
        vec![&self.theta1, &self.theta2, &self.w_out, &self.w_hidden]
    }

    fn tensors_mut(&mut self) -> Vec<&mut Array2<T>> {
        vec![
            &mut self.theta1,
            &mut self.theta2,
            &mut self.w_out,
            &mut self.w_hidden,
        ]
    }
}
