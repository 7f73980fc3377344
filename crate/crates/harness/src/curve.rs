//! Validation reward over training steps, per seed and aggregated.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::{cell_seed, prepare_sources, train_dqn_seeded, train_seed, CellEnv};
use crate::stats;

pub const CURVE_FILE: &str = "curve.csv";
pub const RAW_FILE: &str = "curve_raw.csv";

/// `step,mean,ci,n_seeds` over the seeds' validation rewards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub step: usize,
    pub mean: f64,
    pub ci: f64,
    pub n_seeds: usize,
}

/// `seed,step,loss,epsilon,validation_reward`; `loss` is empty before the
/// first gradient step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRawRow {
    pub seed: usize,
    pub step: usize,
    pub loss: Option<f64>,
    pub epsilon: f64,
    pub validation_reward: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveResult {
    pub curve: Vec<CurvePoint>,
    pub raw: Vec<CurveRawRow>,
    /// Best validation reward retained by each seed.
    pub best_validation: Vec<f64>,
}

/// Trains one DQN per seed on the single (objective, source, L) setting of
/// `cfg`, with the same data and seeds the table uses for that cell.
pub fn run_validation_curve(
    cfg: &ExperimentConfig,
    progress: &dyn Fn(&str),
) -> Result<CurveResult> {
    cfg.validate()?;
    let objectives = cfg.objectives()?;
    let sources = prepare_sources(cfg)?;
    let budgets = cfg.budget_specs();
    let ([objective], [src], [spec]) = (&objectives[..], &sources[..], &budgets[..]) else {
        return Err(HarnessError::Config(
            "a validation curve needs exactly one objective, one graph source and one budget"
                .into(),
        ));
    };
    let real = src.real_world();
    let n = src.num_nodes();
    let budget = spec.resolve(n);
    let cell = CellEnv::new(
        *objective,
        budget,
        cfg.n_sims_for(n, real),
        cfg.greedy_sims_for(n, real),
    )?;
    let root = cell_seed(cfg.seed, *objective, src.code, budget);
    let mut out = CurveResult::default();
    let mut series: Vec<Vec<f64>> = Vec::new();
    for k in 0..cfg.n_seeds {
        progress(&format!("{objective} {} L={budget} seed {k}", src.label));
        let run = train_dqn_seeded(
            &src.split,
            &cell.episode,
            cfg.net_config(real)?,
            cfg.schedule(real)?,
            train_seed(root, k),
        )?;
        for (j, p) in run.log.iter().enumerate() {
            if series.len() <= j {
                series.push(Vec::new());
            }
            series[j].push(p.validation_reward);
            out.raw.push(CurveRawRow {
                seed: k,
                step: p.step,
                loss: p.loss,
                epsilon: p.epsilon,
                validation_reward: p.validation_reward,
            });
        }
        out.best_validation.push(run.best_validation);
    }
    let steps: Vec<usize> = out
        .raw
        .iter()
        .filter(|r| r.seed == 0)
        .map(|r| r.step)
        .collect();
    out.curve = steps
        .into_iter()
        .zip(&series)
        .map(|(step, vals)| CurvePoint {
            step,
            mean: stats::mean(vals),
            ci: stats::ci95(vals),
            n_seeds: vals.len(),
        })
        .collect();
    Ok(out)
}
