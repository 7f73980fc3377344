use netrobust_core::env::EnvState;
use rand::seq::index;
use rand::Rng;

use crate::error::{LearnError, Result};

/// One environment step as stored for replay.
#[derive(Debug, Clone)]
pub struct Transition {
    pub state: EnvState,
    pub action: usize,
    /// Already multiplied by the reward scale.
    pub reward: f64,
    pub next_state: EnvState,
    pub terminal: bool,
}

/// Fixed-capacity FIFO of transitions.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    entries: Vec<Transition>,
    /// Slot the next push overwrites once full.
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(LearnError::InvalidConfig(
                "replay capacity must be positive".into(),
            ));
        }
        Ok(Self {
            capacity,
            entries: Vec::with_capacity(capacity.min(1 << 20)),
            head: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends, evicting the oldest entry when full.
    pub fn push(&mut self, t: Transition) {
        if self.entries.len() < self.capacity {
            self.entries.push(t);
        } else {
            self.entries[self.head] = t;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    /// Oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        let (newer, older) = self.entries.split_at(self.head);
        older.iter().chain(newer)
    }

    /// `batch` distinct entries, uniformly.
    pub fn sample<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Result<Vec<&Transition>> {
        if batch == 0 || batch > self.entries.len() {
            return Err(LearnError::InvalidConfig(format!(
                "cannot draw {batch} transitions from a buffer of {}",
                self.entries.len()
            )));
        }
        Ok(index::sample(rng, self.entries.len(), batch)
            .into_iter()
            .map(|i| &self.entries[i])
            .collect())
    }
}
