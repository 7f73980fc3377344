//! Experiment orchestration for the edge-addition agents: result tables,
//! validation curves, size sweeps and DOT export, plus the `netrobust` CLI.

pub mod config;
pub mod curve;
pub mod dot;
pub mod error;
pub mod experiment;
pub mod stats;
pub mod sweep;
pub mod table;
pub mod workers;

pub use config::{AgentKind, ExperimentConfig};
pub use curve::run_validation_curve;
pub use dot::export_dot;
pub use error::{HarnessError, Result};
pub use sweep::run_size_sweep;
pub use table::run_table;
