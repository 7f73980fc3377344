use netrobust_core::env::{run_episode, EnvState, EpisodeConfig, GraphImprovementEnv, Policy};
use netrobust_core::rng::{derive_seed, seeded, SimRng};
use netrobust_core::Graph;
use rand::Rng;
use rayon::prelude::*;

use super::dataset::DatasetSplit;
use super::replay::{ReplayBuffer, Transition};
use super::schedule::{epsilon_at, TrainSchedule};
use crate::error::{LearnError, Result};
use crate::neural::{
    adam_step, grad_td_loss, q_values_for, AdamState, NetConfig, NetworkParams, TdSample,
};

/// Valid action with the highest Q-value; ties go to the smallest node id.
pub fn act_greedy(state: &EnvState, p: &NetworkParams<f64>) -> Result<usize> {
    let valid = state.valid_actions()?;
    let emb = p.embed_state(state)?;
    let q = q_values_for(&emb, state.stub(), &valid, p)?;
    let mut best = 0;
    for i in 1..q.len() {
        if q[i] > q[best] {
            best = i;
        }
    }
    valid
        .get(best)
        .copied()
        .ok_or(LearnError::Core(netrobust_core::Error::CompleteGraph))
}

/// Largest target-network Q over the valid actions of `state`.
fn max_q(state: &EnvState, p: &NetworkParams<f64>) -> Result<f64> {
    let valid = state.valid_actions()?;
    let emb = p.embed_state(state)?;
    let q = q_values_for(&emb, state.stub(), &valid, p)?;
    Ok(q.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Regression targets `r + gamma max_a' Q_target(s', a')`, with no bootstrap
/// term for terminal transitions.
pub fn td_targets(
    batch: &[&Transition],
    target: &NetworkParams<f64>,
    gamma: f64,
) -> Result<Vec<f64>> {
    batch
        .par_iter()
        .map(|t| {
            if t.terminal {
                Ok(t.reward)
            } else {
                Ok(t.reward + gamma * max_q(&t.next_state, target)?)
            }
        })
        .collect()
}

/// Deterministic policy acting greedily on a Q-network.
pub struct GreedyQPolicy<'a> {
    pub params: &'a NetworkParams<f64>,
}

impl Policy for GreedyQPolicy<'_> {
    fn select(
        &mut self,
        state: &EnvState,
        _valid: &[usize],
        _rng: &mut SimRng,
    ) -> netrobust_core::Result<usize> {
        Ok(act_greedy(state, self.params)?)
    }
}

/// Unscaled episode reward of the greedy policy on each graph; graph `i` runs
/// on the stream `derive_seed(seed, i)`.
pub fn evaluate_greedy(
    p: &NetworkParams<f64>,
    graphs: &[Graph],
    env: &GraphImprovementEnv,
    seed: u64,
) -> Result<Vec<f64>> {
    graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = seeded(derive_seed(seed, i as u64));
            let mut policy = GreedyQPolicy { params: p };
            Ok(run_episode(env, g, &mut policy, &mut rng)?.total_reward)
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// One row of the training log, written at every validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPoint {
    pub step: usize,
    /// Mean TD loss of the gradient steps since the previous row.
    pub loss: Option<f64>,
    pub epsilon: f64,
    pub validation_reward: f64,
}

#[derive(Debug, Clone)]
pub struct DqnOutcome {
    pub best: NetworkParams<f64>,
    pub best_step: usize,
    pub best_validation: f64,
    pub final_params: NetworkParams<f64>,
    pub log: Vec<LogPoint>,
}

/// What one call to [`DqnTrainer::step`] did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub epsilon: f64,
    pub loss: Option<f64>,
    pub target_synced: bool,
    pub validated: Option<f64>,
}

/// DQN with experience replay and a periodically synced target network.
pub struct DqnTrainer<'a> {
    split: &'a DatasetSplit,
    env: GraphImprovementEnv,
    sched: TrainSchedule,
    online: NetworkParams<f64>,
    target: NetworkParams<f64>,
    adam: AdamState<NetworkParams<f64>>,
    buffer: ReplayBuffer,
    rng: SimRng,
    validation_seed: u64,
    step: usize,
    state: Option<EnvState>,
    losses: Vec<f64>,
    log: Vec<LogPoint>,
    best: (NetworkParams<f64>, usize, f64),
}

impl<'a> DqnTrainer<'a> {
    pub fn new(
        split: &'a DatasetSplit,
        cfg: &EpisodeConfig,
        net_cfg: NetConfig,
        sched: TrainSchedule,
        seed: u64,
    ) -> Result<Self> {
        for g in split.train.iter().chain(&split.validate) {
            cfg.validate(g)?;
        }
        Self::with_env(
            split,
            GraphImprovementEnv::from_config(cfg)?,
            net_cfg,
            sched,
            seed,
        )
    }

    /// Trainer on an arbitrary environment, e.g. one with a custom measure.
    pub fn with_env(
        split: &'a DatasetSplit,
        env: GraphImprovementEnv,
        net_cfg: NetConfig,
        sched: TrainSchedule,
        seed: u64,
    ) -> Result<Self> {
        sched.validate()?;
        if split.train.is_empty() || split.validate.is_empty() {
            return Err(LearnError::InvalidConfig(
                "training and validation sets must be nonempty".into(),
            ));
        }
        let mut init_rng = seeded(derive_seed(seed, 0));
        let online = NetworkParams::glorot_init(net_cfg, &mut init_rng)?;
        let adam = AdamState::new(&online, sched.learning_rate);
        let mut trainer = Self {
            split,
            env,
            sched,
            target: online.clone(),
            best: (online.clone(), 0, f64::NEG_INFINITY),
            online,
            adam,
            buffer: ReplayBuffer::new(sched.capacity())?,
            rng: seeded(derive_seed(seed, 1)),
            validation_seed: derive_seed(seed, 2),
            step: 0,
            state: None,
            losses: Vec::new(),
            log: Vec::new(),
        };
        trainer.validate()?;
        Ok(trainer)
    }

    pub fn online(&self) -> &NetworkParams<f64> {
        &self.online
    }

    pub fn target(&self) -> &NetworkParams<f64> {
        &self.target
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn steps_done(&self) -> usize {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.sched.total_steps
    }

    fn validate(&mut self) -> Result<f64> {
        let rewards = evaluate_greedy(
            &self.online,
            &self.split.validate,
            &self.env,
            self.validation_seed,
        )?;
        let value = mean(&rewards);
        let loss = (!self.losses.is_empty()).then(|| mean(&self.losses));
        self.losses.clear();
        self.log.push(LogPoint {
            step: self.step,
            loss,
            epsilon: epsilon_at(self.step, &self.sched),
            validation_reward: value,
        });
        if value > self.best.2 {
            self.best = (self.online.clone(), self.step, value);
        }
        Ok(value)
    }

    fn gradient_step(&mut self) -> Result<f64> {
        let batch = self.buffer.sample(self.sched.batch_size, &mut self.rng)?;
        let targets = td_targets(&batch, &self.target, self.sched.gamma)?;
        let samples: Vec<TdSample<'_, f64>> = batch
            .iter()
            .zip(&targets)
            .map(|(t, &target)| TdSample {
                state: &t.state,
                action: t.action,
                target,
            })
            .collect();
        let out = grad_td_loss(&samples, &self.online)?;
        adam_step(&mut self.online, &out.grad, &mut self.adam)?;
        Ok(out.loss)
    }

    /// One environment step, then one gradient step once the buffer holds a batch.
    pub fn step(&mut self) -> Result<StepReport> {
        if self.is_done() {
            return Err(LearnError::InvalidConfig(
                "training already finished".into(),
            ));
        }
        let state = match self.state.take() {
            Some(s) if !s.is_terminal() => s,
            _ => {
                let g = &self.split.train[self.rng.random_range(0..self.split.train.len())];
                self.env.reset(g.clone(), &mut self.rng)?
            }
        };
        let epsilon = epsilon_at(self.step, &self.sched);
        let action = if self.rng.random::<f64>() < epsilon {
            let valid = state.valid_actions()?;
            valid[self.rng.random_range(0..valid.len())]
        } else {
            act_greedy(&state, &self.online)?
        };
        let outcome = self.env.step(&state, action, &mut self.rng)?;
        self.buffer.push(Transition {
            state,
            action,
            reward: outcome.reward * self.sched.reward_scale,
            next_state: outcome.next_state.clone(),
            terminal: outcome.terminal,
        });
        self.state = Some(outcome.next_state);
        self.step += 1;

        let loss = if self.buffer.len() >= self.sched.batch_size {
            let l = self.gradient_step()?;
            self.losses.push(l);
            Some(l)
        } else {
            None
        };
        let target_synced = self.step.is_multiple_of(self.sched.target_sync_every);
        if target_synced {
            self.target = self.online.clone();
        }
        let validated = if self.step.is_multiple_of(self.sched.validation_every) {
            Some(self.validate()?)
        } else {
            None
        };
        Ok(StepReport {
            step: self.step,
            epsilon,
            loss,
            target_synced,
            validated,
        })
    }

    pub fn run(mut self) -> Result<DqnOutcome> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(self.finish())
    }

    pub fn finish(self) -> DqnOutcome {
        DqnOutcome {
            best: self.best.0,
            best_step: self.best.1,
            best_validation: self.best.2,
            final_params: self.online,
            log: self.log,
        }
    }
}

/// Trains a Q-network and returns the parameters that scored best on the
/// validation graphs.
pub fn train_dqn(
    split: &DatasetSplit,
    cfg: &EpisodeConfig,
    net_cfg: NetConfig,
    sched: TrainSchedule,
    rng: &mut SimRng,
) -> Result<DqnOutcome> {
    DqnTrainer::new(split, cfg, net_cfg, sched, rng.random())?.run()
}
