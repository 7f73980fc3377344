//! Shared pieces of the table, sweep and curve runs: seed layout, graph
//! sources, and per-agent evaluation.
//!
//! Seeds form a tree rooted at the config seed:
//!
//! ```text
//! derive(seed, 0) -> derive(_, family code)           dataset generation
//! derive(seed, 1) -> objective -> source -> L = cell
//!     derive(cell, 0) -> k -> i                       evaluation of graph i, seed k
//!     derive(cell, 1) -> k                            training, seed k
//! derive(seed, 2) -> size                             sweep test graphs
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use netrobust_core::baselines::{run_baseline, BaselineKind, EdgeSelectorPolicy};
use netrobust_core::datagen::{load_and_prepare, Family, GeneratorSpec};
use netrobust_core::env::{run_episode, EpisodeConfig, GraphImprovementEnv};
use netrobust_core::rng::{derive_seed, seeded};
use netrobust_core::robustness::{MonteCarlo, Objective};
use netrobust_core::Graph;
use netrobust_learn::agents::{evaluate_greedy, DatasetSplit, DqnOutcome, DqnTrainer, SlSelector};
use netrobust_learn::agents::{train_sl, SlOutcome, TrainSchedule};
use netrobust_learn::neural::{checkpoint, NetConfig, NetworkParams, RegressorParams};
use rayon::prelude::*;

use crate::config::{AgentKind, ExperimentConfig, GraphSource};
use crate::error::{HarnessError, Result};

const DATA_BRANCH: u64 = 0;
const CELL_BRANCH: u64 = 1;
pub(crate) const SWEEP_BRANCH: u64 = 2;

pub fn family_code(f: Family) -> u64 {
    match f {
        Family::Er => 0,
        Family::Ba => 1,
    }
}

fn objective_code(o: Objective) -> u64 {
    match o {
        Objective::Random => 0,
        Objective::Targeted => 1,
    }
}

/// Seed of the dataset generated for `family`.
pub fn data_seed(master: u64, family: Family) -> u64 {
    derive_seed(derive_seed(master, DATA_BRANCH), family_code(family))
}

/// Root seed of one (objective, source, L) cell; `source_code` is the family
/// code, or `2 + index` for the `index`-th dataset.
pub fn cell_seed(master: u64, objective: Objective, source_code: u64, budget: usize) -> u64 {
    let s = derive_seed(master, CELL_BRANCH);
    let s = derive_seed(s, objective_code(objective));
    let s = derive_seed(s, source_code);
    derive_seed(s, budget as u64)
}

/// Evaluation root for seed `k` of a cell; graph `i` then runs on `derive_seed(root, i)`.
pub fn eval_root(cell: u64, k: usize) -> u64 {
    derive_seed(derive_seed(cell, 0), k as u64)
}

pub fn train_seed(cell: u64, k: usize) -> u64 {
    derive_seed(derive_seed(cell, 1), k as u64)
}

/// Graphs of one source, ready to train and test on.
#[derive(Debug, Clone)]
pub struct PreparedSource {
    pub source: GraphSource,
    pub label: String,
    pub code: u64,
    pub split: DatasetSplit,
}

impl PreparedSource {
    pub fn real_world(&self) -> bool {
        self.source.is_real_world()
    }

    /// Node count used for the default simulation count.
    pub fn num_nodes(&self) -> usize {
        self.split.test.first().map_or(0, Graph::num_nodes)
    }
}

pub fn generator_spec(
    cfg: &ExperimentConfig,
    family: Family,
    n: usize,
    seed: u64,
) -> GeneratorSpec {
    GeneratorSpec {
        er_edge_fraction: cfg.graphs.er_edge_fraction,
        ba_m: cfg.graphs.ba_m,
        ..GeneratorSpec::new(family, n, seed)
    }
}

pub fn prepare_sources(cfg: &ExperimentConfig) -> Result<Vec<PreparedSource>> {
    cfg.sources()?
        .into_iter()
        .enumerate()
        .map(|(i, source)| {
            let (code, split) = match &source {
                GraphSource::Synthetic(f) => {
                    let g = &cfg.graphs;
                    let spec = generator_spec(cfg, *f, g.n, data_seed(cfg.seed, *f));
                    (
                        family_code(*f),
                        DatasetSplit::generate(&spec, g.train, g.validate, g.test)?,
                    )
                }
                GraphSource::Dataset(path) => {
                    let prepared =
                        load_and_prepare(path, cfg.graphs.min_nodes, cfg.graphs.max_nodes)?;
                    (2 + i as u64, DatasetSplit::single(prepared.graph))
                }
            };
            Ok(PreparedSource {
                label: source.label(),
                source,
                code,
                split,
            })
        })
        .collect()
}

/// Whether `agent` runs on this source at all; SL needs more than one graph.
pub fn applies(agent: AgentKind, src: &PreparedSource) -> bool {
    !(agent == AgentKind::Sl && src.real_world())
}

/// Environment and Greedy lookahead measure for one cell.
pub struct CellEnv {
    pub episode: EpisodeConfig,
    pub env: GraphImprovementEnv,
    pub greedy_measure: Arc<MonteCarlo>,
}

impl CellEnv {
    pub fn new(
        objective: Objective,
        budget: usize,
        n_sims: usize,
        greedy_sims: usize,
    ) -> Result<Self> {
        let episode = EpisodeConfig {
            objective,
            budget,
            n_sims,
        };
        Ok(Self {
            env: GraphImprovementEnv::from_config(&episode)?,
            episode,
            greedy_measure: Arc::new(MonteCarlo::new(objective, greedy_sims)),
        })
    }
}

pub fn baseline_kind(agent: AgentKind, greedy_sims: usize) -> Option<BaselineKind> {
    match agent {
        AgentKind::Random => Some(BaselineKind::Random),
        AgentKind::Ldp => Some(BaselineKind::Ldp),
        AgentKind::Fv => Some(BaselineKind::Fv),
        AgentKind::Eres => Some(BaselineKind::Eres),
        AgentKind::Greedy => Some(BaselineKind::Greedy {
            n_sims: greedy_sims,
        }),
        AgentKind::Sl | AgentKind::Dqn => None,
    }
}

/// Episode reward of a baseline on each graph; graph `i` runs on `derive_seed(root, i)`.
pub fn evaluate_baseline(
    kind: BaselineKind,
    graphs: &[Graph],
    cell: &CellEnv,
    root: u64,
) -> Result<Vec<f64>> {
    graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = seeded(derive_seed(root, i as u64));
            Ok(
                run_baseline(g, kind, &cell.env, cell.greedy_measure.clone(), &mut rng)?
                    .total_reward,
            )
        })
        .collect()
}

/// Episode reward of the SL regressor on each graph, seeded as [`evaluate_baseline`].
pub fn evaluate_sl(
    params: &RegressorParams<f64>,
    graphs: &[Graph],
    env: &GraphImprovementEnv,
    root: u64,
) -> Result<Vec<f64>> {
    graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = seeded(derive_seed(root, i as u64));
            let mut policy = EdgeSelectorPolicy::new(SlSelector { params });
            Ok(run_episode(env, g, &mut policy, &mut rng)?.total_reward)
        })
        .collect()
}

pub fn evaluate_dqn(
    params: &NetworkParams<f64>,
    graphs: &[Graph],
    env: &GraphImprovementEnv,
    root: u64,
) -> Result<Vec<f64>> {
    Ok(evaluate_greedy(params, graphs, env, root)?)
}

pub fn train_dqn_seeded(
    split: &DatasetSplit,
    episode: &EpisodeConfig,
    net: NetConfig,
    sched: TrainSchedule,
    seed: u64,
) -> Result<DqnOutcome> {
    Ok(DqnTrainer::new(split, episode, net, sched, seed)?.run()?)
}

pub fn train_sl_seeded(
    split: &DatasetSplit,
    episode: &EpisodeConfig,
    net: NetConfig,
    sched: TrainSchedule,
    seed: u64,
) -> Result<SlOutcome> {
    Ok(train_sl(split, episode, net, sched, &mut seeded(seed))?)
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::File {
        path: dir.to_path_buf(),
        source,
    })
}

/// `<objective>_<family>_L<budget>_<agent>_seed<k>.rndq` under `dir`.
pub fn checkpoint_path(
    dir: &Path,
    objective: Objective,
    family: &str,
    budget: usize,
    agent: AgentKind,
    k: usize,
) -> PathBuf {
    dir.join(format!(
        "{objective}_{family}_L{budget}_{}_seed{k}.rndq",
        agent.name()
    ))
}

pub fn save_q(path: &Path, params: &NetworkParams<f64>) -> Result<()> {
    Ok(checkpoint::save(path, params, None)?)
}

pub fn save_regressor(path: &Path, params: &RegressorParams<f64>) -> Result<()> {
    Ok(checkpoint::save(path, params, None)?)
}
