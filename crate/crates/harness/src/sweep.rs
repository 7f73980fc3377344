//! Out-of-distribution evaluation of a fixed model on larger graphs.

use netrobust_core::rng::derive_seed;
use netrobust_learn::agents::DatasetSplit;
use netrobust_learn::neural::{NetworkParams, RegressorParams};
use serde::{Deserialize, Serialize};

use crate::config::{AgentKind, ExperimentConfig, GraphSource};
use crate::error::{HarnessError, Result};
use crate::experiment::{
    baseline_kind, evaluate_baseline, evaluate_dqn, evaluate_sl, family_code, generator_spec,
    CellEnv, SWEEP_BRANCH,
};
use crate::stats;

pub const SUMMARY_FILE: &str = "sweep_summary.csv";
pub const RAW_FILE: &str = "sweep_raw.csv";

/// Largest graph Greedy and SL are run on.
pub const EXPENSIVE_AGENT_MAX_NODES: usize = 50;

/// `objective,family,n,L,agent,mean,std_error,n_graphs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub objective: String,
    pub family: String,
    pub n: usize,
    #[serde(rename = "L")]
    pub budget: usize,
    pub agent: String,
    pub mean: f64,
    pub std_error: f64,
    pub n_graphs: usize,
}

/// `objective,family,n,L,agent,graph,reward`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRawRow {
    pub objective: String,
    pub family: String,
    pub n: usize,
    #[serde(rename = "L")]
    pub budget: usize,
    pub agent: String,
    pub graph: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub summary: Vec<SweepRow>,
    pub raw: Vec<SweepRawRow>,
}

/// Budget at size `n` for a model trained with budget `base_budget` at
/// `base_n`: proportional to the node count, at least one edge.
pub fn scaled_budget(base_budget: usize, base_n: usize, n: usize) -> usize {
    ((base_budget * n) as f64 / base_n as f64).round().max(1.0) as usize
}

/// Models a sweep evaluates; agents without a model are skipped.
pub struct SweepModels<'a> {
    pub dqn: Option<&'a NetworkParams<f64>>,
    pub sl: Option<&'a RegressorParams<f64>>,
}

/// Evaluates the configured agents on fresh test graphs of every size in
/// `cfg.sweep.sizes`. The config must name one objective, one family and one
/// budget, which applies at `cfg.graphs.n`; ER density stays fixed so the
/// edge count scales with the number of pairs.
pub fn run_size_sweep(
    cfg: &ExperimentConfig,
    models: &SweepModels<'_>,
    progress: &dyn Fn(&str),
) -> Result<SweepResult> {
    cfg.validate()?;
    let (objectives, sources, budgets) = (cfg.objectives()?, cfg.sources()?, cfg.budget_specs());
    let ([objective], [GraphSource::Synthetic(family)], [spec]) =
        (&objectives[..], &sources[..], &budgets[..])
    else {
        return Err(HarnessError::Config(
            "a sweep needs exactly one objective, one synthetic family and one budget".into(),
        ));
    };
    if cfg.sweep.sizes.is_empty() {
        return Err(HarnessError::Config("sweep.sizes is empty".into()));
    }
    let base_n = cfg.graphs.n;
    let base_budget = spec.resolve(base_n);
    let mut out = SweepResult::default();
    for &n in &cfg.sweep.sizes {
        let budget = scaled_budget(base_budget, base_n, n);
        let size_seed = derive_seed(derive_seed(cfg.seed, SWEEP_BRANCH), n as u64);
        let spec = generator_spec(
            cfg,
            *family,
            n,
            derive_seed(size_seed, family_code(*family)),
        );
        let graphs = DatasetSplit::generate(&spec, 0, 0, cfg.graphs.test)?.test;
        let cell = CellEnv::new(
            *objective,
            budget,
            cfg.n_sims_for(n, false),
            cfg.greedy_sims_for(n, false),
        )?;
        for g in &graphs {
            cell.episode.validate(g)?;
        }
        let root = derive_seed(size_seed, 1 << 32);
        for &agent in &cfg.agents {
            let expensive = matches!(agent, AgentKind::Greedy | AgentKind::Sl);
            if expensive && n > EXPENSIVE_AGENT_MAX_NODES {
                continue;
            }
            let rewards = match agent {
                AgentKind::Dqn => match models.dqn {
                    Some(p) => evaluate_dqn(p, &graphs, &cell.env, root)?,
                    None => continue,
                },
                AgentKind::Sl => match models.sl {
                    Some(p) => evaluate_sl(p, &graphs, &cell.env, root)?,
                    None => continue,
                },
                _ => {
                    let kind =
                        baseline_kind(agent, cell.greedy_measure.n_sims).expect("baseline agent");
                    evaluate_baseline(kind, &graphs, &cell, root)?
                }
            };
            progress(&format!(
                "n={n} L={budget} {}: {:.4}",
                agent.name(),
                stats::mean(&rewards)
            ));
            out.raw
                .extend(rewards.iter().enumerate().map(|(i, &reward)| SweepRawRow {
                    objective: objective.to_string(),
                    family: family.to_string(),
                    n,
                    budget,
                    agent: agent.name().to_string(),
                    graph: i,
                    reward,
                }));
            out.summary.push(SweepRow {
                objective: objective.to_string(),
                family: family.to_string(),
                n,
                budget,
                agent: agent.name().to_string(),
                mean: stats::mean(&rewards),
                std_error: stats::std_error(&rewards),
                n_graphs: rewards.len(),
            });
        }
    }
    Ok(out)
}
