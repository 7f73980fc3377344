//! Non-learned edge-addition strategies.
//!
//! Every selector returns one absent edge. Ties go to the lexicographically
//! smallest pair. [`EdgeSelectorPolicy`] replays a selector through the
//! two-step environment by emitting the pair's endpoints in order.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::env::{run_episode, EnvState, EpisodeResult, GraphImprovementEnv, Policy};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodePair};
use crate::rng::{derive_seed, SimRng};
use crate::robustness::RobustnessMeasure;
use crate::spectral::{effective_resistance, fiedler_vector, laplacian_pseudoinverse};

/// Relative slack under which two float scores count as tied.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    Random,
    /// One-step lookahead with `n_sims` simulations per candidate estimate.
    Greedy {
        n_sims: usize,
    },
    Ldp,
    Fv,
    Eres,
}

impl BaselineKind {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::Random => "random",
            BaselineKind::Greedy { .. } => "greedy",
            BaselineKind::Ldp => "ldp",
            BaselineKind::Fv => "fv",
            BaselineKind::Eres => "eres",
        }
    }

    /// Parses a strategy name; `greedy` takes `greedy_sims` simulations per candidate.
    pub fn parse(name: &str, greedy_sims: usize) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "random" => Ok(BaselineKind::Random),
            "greedy" => Ok(BaselineKind::Greedy {
                n_sims: greedy_sims,
            }),
            "ldp" => Ok(BaselineKind::Ldp),
            "fv" => Ok(BaselineKind::Fv),
            "eres" => Ok(BaselineKind::Eres),
            other => Err(Error::InvalidConfig(format!("unknown baseline {other:?}"))),
        }
    }
}

fn non_edges_or_complete(g: &Graph) -> Result<Vec<NodePair>> {
    let candidates = g.non_edges();
    if candidates.is_empty() {
        return Err(Error::CompleteGraph);
    }
    Ok(candidates)
}

/// Index of the first maximal score, treating near-equal scores as ties.
fn argmax_first(scores: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, s) in scores.into_iter().enumerate() {
        if s > best.1 + TIE_TOLERANCE * best.1.abs().max(1.0) || best.1 == f64::NEG_INFINITY {
            best = (i, s);
        }
    }
    best.0
}

/// Uniformly random absent edge.
pub fn select_edge_random<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<NodePair> {
    let candidates = non_edges_or_complete(g)?;
    Ok(candidates[rng.random_range(0..candidates.len())])
}

/// Absent edge with the lowest degree product.
pub fn select_edge_ldp(g: &Graph) -> Result<NodePair> {
    non_edges_or_complete(g)?
        .into_iter()
        .min_by_key(|e| g.degree(e.u()) * g.degree(e.v()))
        .ok_or(Error::CompleteGraph)
}

/// Absent edge whose endpoints are furthest apart in the Fiedler vector.
pub fn select_edge_fv(g: &Graph) -> Result<NodePair> {
    let candidates = non_edges_or_complete(g)?;
    let y = fiedler_vector::<f64>(g)?;
    let best = argmax_first(candidates.iter().map(|e| (y[e.u()] - y[e.v()]).abs()));
    Ok(candidates[best])
}

/// Absent edge with the largest effective resistance.
pub fn select_edge_eres(g: &Graph) -> Result<NodePair> {
    let candidates = non_edges_or_complete(g)?;
    let pinv = laplacian_pseudoinverse::<f64>(g)?;
    let best = argmax_first(
        candidates
            .iter()
            .map(|e| effective_resistance(&pinv, e.u(), e.v())),
    );
    Ok(candidates[best])
}

/// Scores every absent edge by the robustness of the graph with it added;
/// candidate `i` is evaluated with seed `derive_seed(seed, i)`.
pub fn greedy_scores(
    g: &Graph,
    measure: &dyn RobustnessMeasure,
    seed: u64,
) -> Result<Vec<(NodePair, f64)>> {
    let candidates = non_edges_or_complete(g)?;
    candidates
        .into_par_iter()
        .enumerate()
        .map(|(i, e)| {
            let value = measure.evaluate(&g.with_edge(e)?, derive_seed(seed, i as u64))?;
            Ok((e, value))
        })
        .collect()
}

/// Absent edge giving the best estimated robustness after one addition.
pub fn select_edge_greedy(
    g: &Graph,
    measure: &dyn RobustnessMeasure,
    seed: u64,
) -> Result<NodePair> {
    let scores = greedy_scores(g, measure, seed)?;
    Ok(scores[argmax_first(scores.iter().map(|s| s.1))].0)
}

/// Edge-level strategy, callable once per addition.
pub trait EdgeSelector {
    fn select_edge(&mut self, g: &Graph, rng: &mut SimRng) -> Result<NodePair>;
}

/// A closed-form or sampled baseline bound to its measure (for Greedy).
pub struct Baseline {
    kind: BaselineKind,
    measure: Option<Arc<dyn RobustnessMeasure>>,
}

impl Baseline {
    /// `measure` is the objective Greedy looks ahead with; ignored by the others.
    pub fn new(kind: BaselineKind, measure: Arc<dyn RobustnessMeasure>) -> Self {
        Self {
            kind,
            measure: Some(measure),
        }
    }

    pub fn kind(&self) -> BaselineKind {
        self.kind
    }
}

impl EdgeSelector for Baseline {
    fn select_edge(&mut self, g: &Graph, rng: &mut SimRng) -> Result<NodePair> {
        match self.kind {
            BaselineKind::Random => select_edge_random(g, rng),
            BaselineKind::Ldp => select_edge_ldp(g),
            BaselineKind::Fv => select_edge_fv(g),
            BaselineKind::Eres => select_edge_eres(g),
            BaselineKind::Greedy { .. } => {
                let measure = self.measure.as_deref().ok_or_else(|| {
                    Error::InvalidConfig("greedy baseline needs a robustness measure".into())
                })?;
                select_edge_greedy(g, measure, rng.random())
            }
        }
    }
}

/// Drives an [`EdgeSelector`] through the two-step environment.
pub struct EdgeSelectorPolicy<S> {
    selector: S,
    pending: Option<NodePair>,
}

impl<S: EdgeSelector> EdgeSelectorPolicy<S> {
    pub fn new(selector: S) -> Self {
        Self {
            selector,
            pending: None,
        }
    }
}

impl<S: EdgeSelector> Policy for EdgeSelectorPolicy<S> {
    fn select(&mut self, state: &EnvState, valid: &[usize], rng: &mut SimRng) -> Result<usize> {
        let action = match state.stub() {
            None => {
                let e = self.selector.select_edge(state.graph(), rng)?;
                self.pending = Some(e);
                e.u()
            }
            Some(stub) => match self.pending.take() {
                Some(e) if e.u() == stub => e.v(),
                _ => return Err(Error::InvalidAction(stub)),
            },
        };
        if valid.binary_search(&action).is_err() {
            return Err(Error::InvalidAction(action));
        }
        Ok(action)
    }
}

/// Runs `kind` for one episode in `env`.
///
/// Greedy looks ahead with its own simulation count but the same objective as
/// the environment's measure, passed in as `greedy_measure`.
pub fn run_baseline(
    g0: &Graph,
    kind: BaselineKind,
    env: &GraphImprovementEnv,
    greedy_measure: Arc<dyn RobustnessMeasure>,
    rng: &mut SimRng,
) -> Result<EpisodeResult> {
    let mut policy = EdgeSelectorPolicy::new(Baseline::new(kind, greedy_measure));
    run_episode(env, g0, &mut policy, rng)
}
