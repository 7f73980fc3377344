use std::collections::HashSet;

use netrobust_core::datagen::GeneratorSpec;
use netrobust_core::rng::derive_seed;
use netrobust_core::Graph;
use rayon::prelude::*;

use crate::error::{LearnError, Result};

/// Training, validation and test graphs.
#[derive(Debug, Clone, Default)]
pub struct DatasetSplit {
    pub train: Vec<Graph>,
    pub validate: Vec<Graph>,
    pub test: Vec<Graph>,
}

/// Draws beyond the requested total before giving up on finding distinct graphs.
const EXTRA_DRAW_FACTOR: usize = 10;

impl DatasetSplit {
    /// Generates distinct graphs from one seeded stream: draw `i` uses
    /// `derive_seed(spec.seed, i)`, repeats of earlier graphs are skipped, and
    /// the survivors fill test, validate and train in that order, so the test
    /// set does not depend on how many training graphs are requested.
    pub fn generate(
        spec: &GeneratorSpec,
        n_train: usize,
        n_validate: usize,
        n_test: usize,
    ) -> Result<Self> {
        let total = n_train + n_validate + n_test;
        let mut seen = HashSet::with_capacity(total);
        let mut graphs = Vec::with_capacity(total);
        let mut next = 0usize;
        let limit = total.saturating_mul(EXTRA_DRAW_FACTOR).max(64);
        while graphs.len() < total {
            if next >= limit {
                return Err(LearnError::InvalidConfig(format!(
                    "only {} distinct graphs after {limit} draws",
                    graphs.len()
                )));
            }
            let chunk = (total - graphs.len()).max(16);
            let drawn: Vec<Graph> = (next..next + chunk)
                .into_par_iter()
                .map(|i| {
                    GeneratorSpec {
                        seed: derive_seed(spec.seed, i as u64),
                        ..*spec
                    }
                    .generate()
                })
                .collect::<netrobust_core::Result<_>>()?;
            next += chunk;
            for g in drawn {
                if graphs.len() < total && seen.insert(g.clone()) {
                    graphs.push(g);
                }
            }
        }
        let train = graphs.split_off(n_test + n_validate);
        let validate = graphs.split_off(n_test);
        Ok(Self {
            train,
            validate,
            test: graphs,
        })
    }

    /// The same graph in every role, as for a single real-world instance.
    pub fn single(g: Graph) -> Self {
        Self {
            train: vec![g.clone()],
            validate: vec![g.clone()],
            test: vec![g],
        }
    }

    pub fn is_disjoint(&self) -> bool {
        let mut seen = HashSet::new();
        self.train
            .iter()
            .chain(&self.validate)
            .chain(&self.test)
            .all(|g| seen.insert(g))
    }
}
