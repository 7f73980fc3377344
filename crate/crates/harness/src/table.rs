//! Mean episode reward per (objective, family, L, agent).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{AgentKind, ExperimentConfig};
use crate::error::Result;
use crate::experiment::{
    applies, baseline_kind, cell_seed, checkpoint_path, create_dir, eval_root, evaluate_baseline,
    evaluate_dqn, evaluate_sl, prepare_sources, save_q, save_regressor, train_dqn_seeded,
    train_seed, train_sl_seeded, CellEnv,
};
use crate::stats;

pub const SUMMARY_FILE: &str = "table_summary.csv";
pub const RAW_FILE: &str = "table_raw.csv";

/// `objective,family,L,agent,mean,ci,best,n_seeds,n_graphs`.
///
/// `mean` averages every per-graph reward of the row; `ci` is
/// `1.96 * std / sqrt(n_seeds)` over the per-seed means and `best` their maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub objective: String,
    pub family: String,
    #[serde(rename = "L")]
    pub budget: usize,
    pub agent: String,
    pub mean: f64,
    pub ci: f64,
    pub best: f64,
    pub n_seeds: usize,
    pub n_graphs: usize,
}

/// `objective,family,L,agent,seed,graph,reward`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub objective: String,
    pub family: String,
    #[serde(rename = "L")]
    pub budget: usize,
    pub agent: String,
    pub seed: usize,
    pub graph: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableResult {
    pub summary: Vec<SummaryRow>,
    pub raw: Vec<RawRow>,
}

impl TableResult {
    /// Raw rewards of one summary row, grouped by seed.
    pub fn per_seed(&self, row: &SummaryRow) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for r in self.raw.iter().filter(|r| {
            r.objective == row.objective
                && r.family == row.family
                && r.budget == row.budget
                && r.agent == row.agent
        }) {
            if out.len() <= r.seed {
                out.resize(r.seed + 1, Vec::new());
            }
            out[r.seed].push(r.reward);
        }
        out
    }

    pub fn find(
        &self,
        objective: &str,
        family: &str,
        budget: usize,
        agent: &str,
    ) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| {
            r.objective == objective && r.family == family && r.budget == budget && r.agent == agent
        })
    }

    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        create_dir(dir)?;
        let summary = dir.join(SUMMARY_FILE);
        let raw = dir.join(RAW_FILE);
        write_rows(&summary, &self.summary)?;
        write_rows(&raw, &self.raw)?;
        Ok((summary, raw))
    }
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Evaluates every configured agent on every (objective, source, L) cell.
///
/// Closed-form baselines run once; Random, Greedy, SL and DQN run once per
/// seed. Trained models are saved under `checkpoint_dir` when given.
pub fn run_table(
    cfg: &ExperimentConfig,
    checkpoint_dir: Option<&Path>,
    progress: &dyn Fn(&str),
) -> Result<TableResult> {
    cfg.validate()?;
    if let Some(dir) = checkpoint_dir {
        create_dir(dir)?;
    }
    let sources = prepare_sources(cfg)?;
    let mut out = TableResult::default();
    for objective in cfg.objectives()? {
        for src in &sources {
            let real = src.real_world();
            let n = src.num_nodes();
            let net = cfg.net_config(real)?;
            let sched = cfg.schedule(real)?;
            for spec in cfg.budget_specs() {
                let budget = spec.resolve(n);
                let cell = CellEnv::new(
                    objective,
                    budget,
                    cfg.n_sims_for(n, real),
                    cfg.greedy_sims_for(n, real),
                )?;
                for g in src
                    .split
                    .test
                    .iter()
                    .chain(&src.split.train)
                    .chain(&src.split.validate)
                {
                    cell.episode.validate(g)?;
                }
                let root = cell_seed(cfg.seed, objective, src.code, budget);
                for &agent in cfg.agents.iter().filter(|&&a| applies(a, src)) {
                    let seeds = if agent.is_seeded() { cfg.n_seeds } else { 1 };
                    let mut per_seed = Vec::with_capacity(seeds);
                    for k in 0..seeds {
                        progress(&format!(
                            "{objective} {} L={budget} {} seed {k}",
                            src.label,
                            agent.name()
                        ));
                        let eval = eval_root(root, k);
                        let rewards = match agent {
                            AgentKind::Dqn => {
                                let run = train_dqn_seeded(
                                    &src.split,
                                    &cell.episode,
                                    net,
                                    sched,
                                    train_seed(root, k),
                                )?;
                                if let Some(dir) = checkpoint_dir {
                                    save_q(
                                        &checkpoint_path(
                                            dir, objective, &src.label, budget, agent, k,
                                        ),
                                        &run.best,
                                    )?;
                                }
                                evaluate_dqn(&run.best, &src.split.test, &cell.env, eval)?
                            }
                            AgentKind::Sl => {
                                let run = train_sl_seeded(
                                    &src.split,
                                    &cell.episode,
                                    net,
                                    sched,
                                    train_seed(root, k),
                                )?;
                                if let Some(dir) = checkpoint_dir {
                                    save_regressor(
                                        &checkpoint_path(
                                            dir, objective, &src.label, budget, agent, k,
                                        ),
                                        &run.best,
                                    )?;
                                }
                                evaluate_sl(&run.best, &src.split.test, &cell.env, eval)?
                            }
                            _ => {
                                let kind = baseline_kind(agent, cell.greedy_measure.n_sims)
                                    .expect("baseline agent");
                                evaluate_baseline(kind, &src.split.test, &cell, eval)?
                            }
                        };
                        out.raw
                            .extend(rewards.iter().enumerate().map(|(i, &reward)| RawRow {
                                objective: objective.to_string(),
                                family: src.label.clone(),
                                budget,
                                agent: agent.name().to_string(),
                                seed: k,
                                graph: i,
                                reward,
                            }));
                        per_seed.push(rewards);
                    }
                    out.summary.push(summarize(
                        objective.name(),
                        &src.label,
                        budget,
                        agent.name(),
                        &per_seed,
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Summary row of per-seed, per-graph rewards.
pub fn summarize(
    objective: &str,
    family: &str,
    budget: usize,
    agent: &str,
    per_seed: &[Vec<f64>],
) -> SummaryRow {
    let all: Vec<f64> = per_seed.iter().flatten().copied().collect();
    let seed_means: Vec<f64> = per_seed.iter().map(|r| stats::mean(r)).collect();
    SummaryRow {
        objective: objective.to_string(),
        family: family.to_string(),
        budget,
        agent: agent.to_string(),
        mean: stats::mean(&all),
        ci: stats::ci95(&seed_means),
        best: seed_means.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        n_seeds: per_seed.len(),
        n_graphs: per_seed.first().map_or(0, Vec::len),
    }
}
