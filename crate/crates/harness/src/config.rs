//! Experiment configuration, read from TOML.
//!
//! ```toml
//! output_dir = "results"
//! seed = 0
//! n_seeds = 3
//! objectives = ["random", "targeted"]
//! budgets = [2, 5, 10]          # edge budgets L; or `taus = [1.0]` in percent
//! agents = ["random", "ldp", "fv", "eres", "greedy", "sl", "dqn"]
//! # n_sims = 40                 # default 2N, or 40 for datasets
//! # greedy_sims = 40            # default n_sims
//!
//! [graphs]
//! families = ["ba", "er"]       # or: datasets = ["data/grid.edges"]
//! n = 20
//! train = 500
//! validate = 50
//! test = 100
//!
//! [net]                         # optional overrides
//! embed_dim = 64
//!
//! [schedule]                    # optional overrides
//! total_steps = 5000
//! learning_rate = 1e-4
//!
//! [sweep]
//! sizes = [20, 30, 40, 50]
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use netrobust_core::datagen::Family;
use netrobust_core::env::budget_from_percent;
use netrobust_core::robustness::{default_n_sims, Objective, REAL_WORLD_N_SIMS};
use netrobust_learn::agents::TrainSchedule;
use netrobust_learn::neural::NetConfig;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Training steps when the config does not set `schedule.total_steps`.
pub const DEFAULT_TOTAL_STEPS: usize = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Random,
    Ldp,
    Fv,
    Eres,
    Greedy,
    Sl,
    Dqn,
}

impl AgentKind {
    pub const ALL: [AgentKind; 7] = [
        AgentKind::Random,
        AgentKind::Ldp,
        AgentKind::Fv,
        AgentKind::Eres,
        AgentKind::Greedy,
        AgentKind::Sl,
        AgentKind::Dqn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Random => "random",
            AgentKind::Ldp => "ldp",
            AgentKind::Fv => "fv",
            AgentKind::Eres => "eres",
            AgentKind::Greedy => "greedy",
            AgentKind::Sl => "sl",
            AgentKind::Dqn => "dqn",
        }
    }

    /// Agents whose result depends on the seed and are therefore repeated.
    pub fn is_seeded(self) -> bool {
        matches!(
            self,
            AgentKind::Random | AgentKind::Greedy | AgentKind::Sl | AgentKind::Dqn
        )
    }
}

impl FromStr for AgentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| HarnessError::Config(format!("unknown agent {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphsConfig {
    #[serde(default)]
    pub families: Vec<String>,
    /// Pre-extracted real-world edge lists; each is trained and tested on alone.
    #[serde(default)]
    pub datasets: Vec<PathBuf>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub train: usize,
    #[serde(default)]
    pub validate: usize,
    #[serde(default = "default_test")]
    pub test: usize,
    /// ER edge density as a fraction of all pairs.
    #[serde(default = "default_er_fraction")]
    pub er_edge_fraction: f64,
    #[serde(default = "default_ba_m")]
    pub ba_m: usize,
    #[serde(default = "default_min_nodes")]
    pub min_nodes: usize,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
}

fn default_n() -> usize {
    20
}
fn default_test() -> usize {
    100
}
fn default_er_fraction() -> f64 {
    0.2
}
fn default_ba_m() -> usize {
    2
}
fn default_min_nodes() -> usize {
    20
}
fn default_max_nodes() -> usize {
    50
}

impl Default for GraphsConfig {
    fn default() -> Self {
        Self {
            families: Vec::new(),
            datasets: Vec::new(),
            n: default_n(),
            train: 0,
            validate: 0,
            test: default_test(),
            er_edge_fraction: default_er_fraction(),
            ba_m: default_ba_m(),
            min_nodes: default_min_nodes(),
            max_nodes: default_max_nodes(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetOverrides {
    pub embed_dim: Option<usize>,
    pub hidden: Option<usize>,
    pub rounds: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleOverrides {
    pub total_steps: Option<usize>,
    pub batch_size: Option<usize>,
    pub target_sync_every: Option<usize>,
    pub gamma: Option<f64>,
    pub eps_start: Option<f64>,
    pub eps_end: Option<f64>,
    pub eps_decay_fraction: Option<f64>,
    pub reward_scale: Option<f64>,
    pub validation_every: Option<usize>,
    pub replay_capacity: Option<usize>,
    pub learning_rate: Option<f64>,
    pub early_stopping_patience: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_n_seeds")]
    pub n_seeds: usize,
    pub objectives: Vec<String>,
    #[serde(default)]
    pub budgets: Vec<usize>,
    #[serde(default)]
    pub taus: Vec<f64>,
    #[serde(default = "default_agents")]
    pub agents: Vec<AgentKind>,
    pub n_sims: Option<usize>,
    pub greedy_sims: Option<usize>,
    #[serde(default)]
    pub graphs: GraphsConfig,
    #[serde(default)]
    pub net: NetOverrides,
    #[serde(default)]
    pub schedule: ScheduleOverrides,
    #[serde(default)]
    pub sweep: SweepConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}
fn default_n_seeds() -> usize {
    1
}
fn default_agents() -> Vec<AgentKind> {
    AgentKind::ALL.to_vec()
}

/// Where the graphs of one table column group come from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Synthetic(Family),
    Dataset(PathBuf),
}

impl GraphSource {
    /// Label written to the `family` column.
    pub fn label(&self) -> String {
        match self {
            GraphSource::Synthetic(f) => f.name().to_string(),
            GraphSource::Dataset(p) => p.file_stem().map_or_else(
                || p.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            ),
        }
    }

    pub fn is_real_world(&self) -> bool {
        matches!(self, GraphSource::Dataset(_))
    }
}

/// Requested edge budget: fixed, or a percentage of the possible edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetSpec {
    Edges(usize),
    Percent(f64),
}

impl BudgetSpec {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            BudgetSpec::Edges(l) => l,
            BudgetSpec::Percent(tau) => budget_from_percent(n, tau).max(1),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::File {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.n_seeds == 0 {
            return bad("n_seeds must be at least 1".into());
        }
        if self.objectives.is_empty() {
            return bad("at least one objective is required".into());
        }
        self.objectives()?;
        self.sources()?;
        if self.budgets.is_empty() == self.taus.is_empty() {
            return bad("give exactly one of `budgets` or `taus`".into());
        }
        if self.budgets.contains(&0) || self.taus.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("budgets and taus must be positive".into());
        }
        if self.agents.is_empty() {
            return bad("at least one agent is required".into());
        }
        if self.n_sims == Some(0) || self.greedy_sims == Some(0) {
            return bad("simulation counts must be positive".into());
        }
        for p in &self.graphs.datasets {
            if !p.exists() {
                return bad(format!("dataset {} does not exist", p.display()));
            }
        }
        let g = &self.graphs;
        if !g.datasets.is_empty() && !g.families.is_empty() {
            return bad("use either graphs.families or graphs.datasets, not both".into());
        }
        if g.test == 0 && g.datasets.is_empty() {
            return bad("graphs.test must be at least 1".into());
        }
        let trains = self
            .agents
            .iter()
            .any(|a| matches!(a, AgentKind::Sl | AgentKind::Dqn));
        if trains && g.datasets.is_empty() && (g.train == 0 || g.validate == 0) {
            return bad("trained agents need graphs.train and graphs.validate".into());
        }
        if g.min_nodes > g.max_nodes {
            return bad("graphs.min_nodes exceeds graphs.max_nodes".into());
        }
        if self.sweep.sizes.contains(&0) {
            return bad("sweep sizes must be positive".into());
        }
        self.net_config(false)?;
        self.schedule(false)?;
        Ok(())
    }

    pub fn objectives(&self) -> Result<Vec<Objective>> {
        self.objectives
            .iter()
            .map(|s| Ok(Objective::from_str(s)?))
            .collect()
    }

    pub fn sources(&self) -> Result<Vec<GraphSource>> {
        if !self.graphs.datasets.is_empty() {
            return Ok(self
                .graphs
                .datasets
                .iter()
                .cloned()
                .map(GraphSource::Dataset)
                .collect());
        }
        if self.graphs.families.is_empty() {
            return Err(HarnessError::Config(
                "graphs.families or graphs.datasets is required".into(),
            ));
        }
        self.graphs
            .families
            .iter()
            .map(|s| Ok(GraphSource::Synthetic(Family::from_str(s)?)))
            .collect()
    }

    pub fn budget_specs(&self) -> Vec<BudgetSpec> {
        if self.budgets.is_empty() {
            self.taus.iter().map(|&t| BudgetSpec::Percent(t)).collect()
        } else {
            self.budgets.iter().map(|&l| BudgetSpec::Edges(l)).collect()
        }
    }

    /// Simulations per robustness estimate on a graph of `n` nodes.
    pub fn n_sims_for(&self, n: usize, real_world: bool) -> usize {
        self.n_sims.unwrap_or(if real_world {
            REAL_WORLD_N_SIMS
        } else {
            default_n_sims(n)
        })
    }

    pub fn greedy_sims_for(&self, n: usize, real_world: bool) -> usize {
        self.greedy_sims
            .unwrap_or_else(|| self.n_sims_for(n, real_world))
    }

    pub fn net_config(&self, real_world: bool) -> Result<NetConfig> {
        let base = if real_world {
            NetConfig::REAL_WORLD
        } else {
            NetConfig::SYNTHETIC
        };
        let cfg = NetConfig {
            embed_dim: self.net.embed_dim.unwrap_or(base.embed_dim),
            hidden: self.net.hidden.unwrap_or(base.hidden),
            rounds: self.net.rounds.unwrap_or(base.rounds),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn schedule(&self, real_world: bool) -> Result<TrainSchedule> {
        let o = &self.schedule;
        let total = o.total_steps.unwrap_or(DEFAULT_TOTAL_STEPS);
        let base = if real_world {
            TrainSchedule::real_world(total)
        } else {
            TrainSchedule::synthetic(total)
        };
        let sched = TrainSchedule {
            total_steps: total,
            batch_size: o.batch_size.unwrap_or(base.batch_size),
            target_sync_every: o.target_sync_every.unwrap_or(base.target_sync_every),
            gamma: o.gamma.unwrap_or(base.gamma),
            eps_start: o.eps_start.unwrap_or(base.eps_start),
            eps_end: o.eps_end.unwrap_or(base.eps_end),
            eps_decay_fraction: o.eps_decay_fraction.unwrap_or(base.eps_decay_fraction),
            reward_scale: o.reward_scale.unwrap_or(base.reward_scale),
            validation_every: o.validation_every.unwrap_or(base.validation_every),
            replay_capacity: o.replay_capacity.or(base.replay_capacity),
            learning_rate: o.learning_rate.unwrap_or(base.learning_rate),
            early_stopping_patience: o
                .early_stopping_patience
                .unwrap_or(base.early_stopping_patience),
        };
        sched.validate()?;
        Ok(sched)
    }
}
