use netrobust_core::baselines::{select_edge_random, EdgeSelector};
use netrobust_core::env::EpisodeConfig;
use netrobust_core::rng::{derive_seed, seeded, SimRng};
use netrobust_core::robustness::RobustnessMeasure;
use netrobust_core::{Graph, NodePair};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use super::dataset::DatasetSplit;
use super::schedule::TrainSchedule;
use crate::error::{LearnError, Result};
use crate::neural::{adam_step, grad_mse, mse, AdamState, NetConfig, RegressorParams};

/// Labeled graphs: `j` uniformly random edge additions for `j` uniform in
/// `0..=budget`, labeled with a Monte Carlo estimate of the objective.
///
/// Graph `i` of `source` uses the stream `derive_seed(seed, i)`.
pub fn build_pairs(
    source: &[Graph],
    budget: usize,
    measure: &dyn RobustnessMeasure,
    seed: u64,
) -> Result<Vec<(Graph, f64)>> {
    source
        .par_iter()
        .enumerate()
        .map(|(i, g0)| {
            let mut rng = seeded(derive_seed(seed, i as u64));
            let additions = rng.random_range(0..=budget);
            let mut g = g0.clone();
            for _ in 0..additions {
                if g.is_complete() {
                    break;
                }
                let e = select_edge_random(&g, &mut rng)?;
                g.add_edge(e)?;
            }
            let label = measure.evaluate(&g, rng.random())?;
            Ok((g, label))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlLogPoint {
    pub step: usize,
    pub train_loss: Option<f64>,
    pub validation_loss: f64,
}

#[derive(Debug, Clone)]
pub struct SlOutcome {
    pub best: RegressorParams<f64>,
    pub best_step: usize,
    pub best_validation_loss: f64,
    pub initial_validation_loss: f64,
    /// Gradient steps taken before finishing or stopping early.
    pub steps: usize,
    pub log: Vec<SlLogPoint>,
}

fn as_batch(pairs: &[(Graph, f64)]) -> Vec<(&Graph, f64)> {
    pairs.iter().map(|(g, y)| (g, *y)).collect()
}

/// Fits a robustness regressor with MSE and keeps the parameters with the
/// lowest validation loss. Training stops early once the validation loss has
/// not improved for `sched.early_stopping_patience` steps.
pub fn train_sl(
    split: &DatasetSplit,
    cfg: &EpisodeConfig,
    net_cfg: NetConfig,
    sched: TrainSchedule,
    rng: &mut SimRng,
) -> Result<SlOutcome> {
    sched.validate()?;
    if split.train.is_empty() || split.validate.is_empty() {
        return Err(LearnError::InvalidConfig(
            "training and validation sets must be nonempty".into(),
        ));
    }
    let seed: u64 = rng.random();
    let measure = cfg.measure();
    let train = build_pairs(&split.train, cfg.budget, &measure, derive_seed(seed, 0))?;
    let validate = build_pairs(&split.validate, cfg.budget, &measure, derive_seed(seed, 1))?;
    fit_regressor(&train, &validate, net_cfg, sched, derive_seed(seed, 2))
}

/// The optimization loop of [`train_sl`] on prepared pairs.
pub fn fit_regressor(
    train: &[(Graph, f64)],
    validate: &[(Graph, f64)],
    net_cfg: NetConfig,
    sched: TrainSchedule,
    seed: u64,
) -> Result<SlOutcome> {
    sched.validate()?;
    if train.is_empty() || validate.is_empty() {
        return Err(LearnError::EmptyBatch);
    }
    let mut rng = seeded(seed);
    let mut params = RegressorParams::glorot_init(net_cfg, &mut rng)?;
    let mut adam = AdamState::new(&params, sched.learning_rate);
    let val_batch = as_batch(validate);
    let initial = mse(&val_batch, &params)?;
    let mut best = (params.clone(), 0, initial);
    let mut log = vec![SlLogPoint {
        step: 0,
        train_loss: None,
        validation_loss: initial,
    }];
    let batch_size = sched.batch_size.min(train.len());
    let mut losses = Vec::new();
    let mut step = 0;
    while step < sched.total_steps {
        let picked: Vec<(&Graph, f64)> = index::sample(&mut rng, train.len(), batch_size)
            .into_iter()
            .map(|i| (&train[i].0, train[i].1))
            .collect();
        let out = grad_mse(&picked, &params)?;
        adam_step(&mut params, &out.grad, &mut adam)?;
        losses.push(out.loss);
        step += 1;
        if step % sched.validation_every == 0 || step == sched.total_steps {
            let v = mse(&val_batch, &params)?;
            log.push(SlLogPoint {
                step,
                train_loss: Some(losses.iter().sum::<f64>() / losses.len() as f64),
                validation_loss: v,
            });
            losses.clear();
            if v < best.2 {
                best = (params.clone(), step, v);
            }
            if step - best.1 >= sched.early_stopping_patience {
                break;
            }
        }
    }
    Ok(SlOutcome {
        best: best.0,
        best_step: best.1,
        best_validation_loss: best.2,
        initial_validation_loss: initial,
        steps: step,
        log,
    })
}

/// Scores of every one-edge extension of `g`, in `non_edges` order.
pub fn sl_scores(g: &Graph, p: &RegressorParams<f64>) -> Result<Vec<(NodePair, f64)>> {
    let candidates = g.non_edges();
    if candidates.is_empty() {
        return Err(LearnError::Core(netrobust_core::Error::CompleteGraph));
    }
    candidates
        .into_par_iter()
        .map(|e| Ok((e, p.predict(&g.with_edge(e)?)?)))
        .collect()
}

/// Absent edge whose addition maximizes the predicted robustness; ties go to
/// the lexicographically smallest pair.
pub fn act_sl(g: &Graph, p: &RegressorParams<f64>) -> Result<NodePair> {
    let scores = sl_scores(g, p)?;
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i].1 > scores[best].1 {
            best = i;
        }
    }
    Ok(scores[best].0)
}

/// Edge selector backed by a trained regressor.
pub struct SlSelector<'a> {
    pub params: &'a RegressorParams<f64>,
}

impl EdgeSelector for SlSelector<'_> {
    fn select_edge(&mut self, g: &Graph, _rng: &mut SimRng) -> netrobust_core::Result<NodePair> {
        Ok(act_sl(g, self.params)?)
    }
}
