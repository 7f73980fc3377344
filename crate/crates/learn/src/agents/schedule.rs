use crate::error::{LearnError, Result};

/// Optimization and exploration settings shared by the DQN and SL trainers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSchedule {
    pub total_steps: usize,
    pub batch_size: usize,
    pub target_sync_every: usize,
    pub gamma: f64,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Share of `total_steps` over which epsilon decays linearly.
    pub eps_decay_fraction: f64,
    pub reward_scale: f64,
    pub validation_every: usize,
    /// Replay capacity; the trainers use `total_steps` when unset.
    pub replay_capacity: Option<usize>,
    pub learning_rate: f64,
    /// SL stops after this many steps without a better validation loss.
    pub early_stopping_patience: usize,
}

impl TrainSchedule {
    /// Synthetic-graph defaults for a run of `total_steps`.
    pub fn synthetic(total_steps: usize) -> Self {
        Self {
            total_steps,
            batch_size: 50,
            target_sync_every: 50,
            gamma: 1.0,
            eps_start: 1.0,
            eps_end: 0.1,
            eps_decay_fraction: 0.5,
            reward_scale: 100.0,
            validation_every: (total_steps / 100).max(1),
            replay_capacity: None,
            learning_rate: 1e-4,
            early_stopping_patience: 10_000,
        }
    }

    /// Real-world defaults: epsilon decays over the first tenth only.
    pub fn real_world(total_steps: usize) -> Self {
        Self {
            eps_decay_fraction: 0.1,
            ..Self::synthetic(total_steps)
        }
    }

    /// `4 * 10^4 * tau` steps for an edge percentage `tau`.
    pub fn steps_for_tau(tau: f64) -> usize {
        (4e4 * tau).round() as usize
    }

    pub fn capacity(&self) -> usize {
        self.replay_capacity.unwrap_or(self.total_steps).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("total_steps", self.total_steps),
            ("batch_size", self.batch_size),
            ("target_sync_every", self.target_sync_every),
            ("validation_every", self.validation_every),
            ("early_stopping_patience", self.early_stopping_patience),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(LearnError::InvalidConfig(format!(
                "{name} must be at least 1"
            )));
        }
        if !(0.0..=1.0).contains(&self.eps_end) || !(self.eps_end..=1.0).contains(&self.eps_start) {
            return Err(LearnError::InvalidConfig(format!(
                "need 0 <= eps_end <= eps_start <= 1, got {} and {}",
                self.eps_end, self.eps_start
            )));
        }
        if !(0.0..=1.0).contains(&self.eps_decay_fraction) {
            return Err(LearnError::InvalidConfig(
                "eps_decay_fraction must lie in [0, 1]".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.reward_scale > 0.0 && self.gamma >= 0.0) {
            return Err(LearnError::InvalidConfig(
                "learning rate and reward scale must be positive, gamma non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Exploration rate after `step` steps: linear from `eps_start` to `eps_end`
/// over the decay window, then constant.
pub fn epsilon_at(step: usize, sched: &TrainSchedule) -> f64 {
    let window = sched.eps_decay_fraction * sched.total_steps as f64;
    if window <= 0.0 || step as f64 >= window {
        return sched.eps_end;
    }
    let frac = step as f64 / window;
    sched.eps_start + (sched.eps_end - sched.eps_start) * frac
}
