//! Robustness of undirected graphs to node removal, and the machinery for
//! improving it by adding edges.
//!
//! * [`graph`]: labeled simple graphs with stable labels under node removal.
//! * [`robustness`]: critical-fraction estimation (Monte Carlo and exhaustive).
//! * [`spectral`]: Jacobi eigensolver, Fiedler vector, Laplacian pseudoinverse.
//! * [`env`]: the two-step edge-addition environment.
//! * [`baselines`]: Random, Greedy, LDP, FV, and ERes edge selectors.
//! * [`datagen`]: ER/BA generators and edge-list preparation.

pub mod baselines;
pub mod datagen;
pub mod env;
pub mod error;
pub mod graph;
pub mod rng;
pub mod robustness;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, NodePair};
pub use scalar::Scalar;

/// Double-precision symmetric matrix used by the spectral baselines.
pub type SymmetricMatrix = spectral::SymmetricMatrix<f64>;
/// Double-precision eigendecomposition.
pub type EigenDecomposition = spectral::EigenDecomposition<f64>;
/// Exact robustness value.
pub type Fraction = num_rational::Ratio<u64>;
