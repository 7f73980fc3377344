//! Edge-addition environment.
//!
//! An edge is added every two steps: the first step picks an endpoint (the
//! edge stub), the second picks its partner. After `L` additions the episode
//! ends and the only non-zero reward, `F(G_L) - F(G_0)`, is paid out.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodePair};
use crate::rng::SimRng;
use crate::robustness::{MonteCarlo, Objective, RobustnessMeasure};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeConfig {
    pub objective: Objective,
    /// Number of edges to add.
    pub budget: usize,
    /// Monte Carlo simulations per robustness estimate.
    pub n_sims: usize,
}

impl EpisodeConfig {
    pub fn validate(&self, g0: &Graph) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidConfig(
                "edge budget must be at least 1".into(),
            ));
        }
        if self.n_sims == 0 {
            return Err(Error::NoSimulations);
        }
        if self.budget > g0.num_non_edges() {
            return Err(Error::InvalidConfig(format!(
                "edge budget {} exceeds the {} absent edges",
                self.budget,
                g0.num_non_edges()
            )));
        }
        Ok(())
    }

    pub fn measure(&self) -> MonteCarlo {
        MonteCarlo::new(self.objective, self.n_sims)
    }
}

/// Edge budget covering `percent` of all possible edges on `n` nodes, rounded.
///
/// Published budgets are not all reproduced by this rounding; experiment
/// configurations take `L` directly and use this only as a convenience.
pub fn budget_from_percent(n: usize, percent: f64) -> usize {
    (percent / 100.0 * (n * n.saturating_sub(1)) as f64 / 2.0).round() as usize
}

/// Environment state: current graph, optional edge stub, and step counter.
#[derive(Debug, Clone)]
pub struct EnvState {
    graph: Arc<Graph>,
    stub: Option<usize>,
    t: usize,
    budget: usize,
    f_initial: f64,
    terminal: bool,
}

impl EnvState {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shared_graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn stub(&self) -> Option<usize> {
        self.stub
    }

    pub fn step_index(&self) -> usize {
        self.t
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn f_initial(&self) -> f64 {
        self.f_initial
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// Builds a mid-episode state directly; mostly useful for tests and replay.
    pub fn from_parts(
        graph: Arc<Graph>,
        stub: Option<usize>,
        t: usize,
        budget: usize,
        f_initial: f64,
    ) -> Self {
        Self {
            graph,
            stub,
            t,
            budget,
            f_initial,
            terminal: t >= 2 * budget,
        }
    }

    /// Sorted valid node selections.
    ///
    /// Without a stub: every node that still has a non-neighbor. With stub `s`:
    /// every node other than `s` not adjacent to it.
    pub fn valid_actions(&self) -> Result<Vec<usize>> {
        if self.terminal {
            return Err(Error::TerminalState);
        }
        let g = &*self.graph;
        let n = g.num_live_nodes();
        Ok(match self.stub {
            None => g.live_nodes().filter(|&v| g.degree(v) + 1 < n).collect(),
            Some(s) => g
                .live_nodes()
                .filter(|&v| v != s && !g.has_edge(s, v))
                .collect(),
        })
    }

    fn is_valid(&self, a: usize) -> bool {
        let g = &*self.graph;
        if !g.is_live(a) {
            return false;
        }
        match self.stub {
            None => g.degree(a) + 1 < g.num_live_nodes(),
            Some(s) => a != s && !g.has_edge(s, a),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub next_state: EnvState,
    /// Unscaled reward; zero unless `terminal`.
    pub reward: f64,
    pub terminal: bool,
}

/// The environment: a robustness measure and an edge budget.
#[derive(Clone)]
pub struct GraphImprovementEnv {
    measure: Arc<dyn RobustnessMeasure>,
    budget: usize,
}

impl std::fmt::Debug for GraphImprovementEnv {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphImprovementEnv")
            .field("budget", &self.budget)
            .finish_non_exhaustive()
    }
}

impl GraphImprovementEnv {
    pub fn new(measure: Arc<dyn RobustnessMeasure>, budget: usize) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidConfig(
                "edge budget must be at least 1".into(),
            ));
        }
        Ok(Self { measure, budget })
    }

    /// Monte Carlo environment for `cfg`.
    pub fn from_config(cfg: &EpisodeConfig) -> Result<Self> {
        if cfg.n_sims == 0 {
            return Err(Error::NoSimulations);
        }
        Self::new(Arc::new(cfg.measure()), cfg.budget)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn measure(&self) -> &dyn RobustnessMeasure {
        &*self.measure
    }

    /// Start state for `g0`; estimates and caches `F(G_0)`.
    pub fn reset(&self, g0: Graph, rng: &mut SimRng) -> Result<EnvState> {
        if !g0.is_connected() {
            return Err(Error::Disconnected);
        }
        if self.budget > g0.num_non_edges() {
            return Err(Error::InvalidConfig(format!(
                "edge budget {} exceeds the {} absent edges",
                self.budget,
                g0.num_non_edges()
            )));
        }
        let f_initial = self.measure.evaluate(&g0, rng.random())?;
        Ok(EnvState {
            graph: Arc::new(g0),
            stub: None,
            t: 0,
            budget: self.budget,
            f_initial,
            terminal: false,
        })
    }

    pub fn step(&self, s: &EnvState, action: usize, rng: &mut SimRng) -> Result<StepOutcome> {
        if s.terminal {
            return Err(Error::TerminalState);
        }
        if !s.is_valid(action) {
            return Err(Error::InvalidAction(action));
        }
        let t = s.t + 1;
        let Some(stub) = s.stub else {
            return Ok(StepOutcome {
                next_state: EnvState {
                    stub: Some(action),
                    t,
                    terminal: false,
                    ..s.clone()
                },
                reward: 0.0,
                terminal: false,
            });
        };
        let graph = Arc::new(s.graph.with_edge(NodePair::new(stub, action)?)?);
        // a complete graph ends the episode early; unreachable when the budget
        // fits within the initial non-edges
        let terminal = t >= 2 * s.budget || graph.is_complete();
        let reward = if terminal {
            self.measure.evaluate(&graph, rng.random())? - s.f_initial
        } else {
            0.0
        };
        Ok(StepOutcome {
            next_state: EnvState {
                graph,
                stub: None,
                t,
                budget: s.budget,
                f_initial: s.f_initial,
                terminal,
            },
            reward,
            terminal,
        })
    }
}

/// Chooses one node per environment step.
pub trait Policy {
    fn select(&mut self, state: &EnvState, valid: &[usize], rng: &mut SimRng) -> Result<usize>;
}

/// Uniform over the valid actions of each step.
#[derive(Debug, Default, Clone, Copy)]
pub struct RandomActionPolicy;

impl Policy for RandomActionPolicy {
    fn select(&mut self, _state: &EnvState, valid: &[usize], rng: &mut SimRng) -> Result<usize> {
        if valid.is_empty() {
            return Err(Error::CompleteGraph);
        }
        Ok(valid[rng.random_range(0..valid.len())])
    }
}

/// Always the smallest valid node.
#[derive(Debug, Default, Clone, Copy)]
pub struct FirstValidPolicy;

impl Policy for FirstValidPolicy {
    fn select(&mut self, _state: &EnvState, valid: &[usize], _rng: &mut SimRng) -> Result<usize> {
        valid.first().copied().ok_or(Error::CompleteGraph)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub stub: Option<usize>,
    pub action: usize,
    pub reward: f64,
}

#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub final_graph: Graph,
    pub total_reward: f64,
    pub f_initial: f64,
    pub added_edges: Vec<NodePair>,
    pub trajectory: Vec<TrajectoryRecord>,
}

impl EpisodeResult {
    /// `step,stub,action,reward` lines; an empty stub is written as `-`.
    pub fn trajectory_log(&self) -> String {
        let mut out = String::from("step,stub,action,reward\n");
        for r in &self.trajectory {
            let stub = r.stub.map_or_else(|| "-".to_string(), |s| s.to_string());
            let _ = writeln!(out, "{},{},{},{}", r.step, stub, r.action, r.reward);
        }
        out
    }
}

/// Plays one episode from `g0` to termination.
pub fn run_episode(
    env: &GraphImprovementEnv,
    g0: &Graph,
    policy: &mut dyn Policy,
    rng: &mut SimRng,
) -> Result<EpisodeResult> {
    let mut state = env.reset(g0.clone(), rng)?;
    let f_initial = state.f_initial;
    let mut total_reward = 0.0;
    let mut trajectory = Vec::with_capacity(2 * env.budget);
    let mut added_edges = Vec::with_capacity(env.budget);
    while !state.is_terminal() {
        let valid = state.valid_actions()?;
        let action = policy.select(&state, &valid, rng)?;
        let outcome = env.step(&state, action, rng)?;
        if let Some(stub) = state.stub {
            added_edges.push(NodePair::new(stub, action)?);
        }
        trajectory.push(TrajectoryRecord {
            step: state.t,
            stub: state.stub,
            action,
            reward: outcome.reward,
        });
        total_reward += outcome.reward;
        state = outcome.next_state;
    }
    Ok(EpisodeResult {
        final_graph: Arc::unwrap_or_clone(state.graph),
        total_reward,
        f_initial,
        added_edges,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::robustness::{ExactOracle, RemovalStrategy};

    fn exact_env(budget: usize) -> GraphImprovementEnv {
        let oracle = ExactOracle {
            strategy: RemovalStrategy::RANDOM,
        };
        GraphImprovementEnv::new(Arc::new(oracle), budget).unwrap()
    }

    #[test]
    fn valid_actions_follow_degree_and_stub_rules() {
        let env = exact_env(1);
        let mut rng = seeded(0);
        let s0 = env.reset(Graph::path(3), &mut rng).unwrap();
        assert_eq!(s0.valid_actions().unwrap(), vec![0, 2]);
        let s1 = env.step(&s0, 0, &mut rng).unwrap().next_state;
        assert_eq!(s1.valid_actions().unwrap(), vec![2]);
        let k4 = EnvState::from_parts(Arc::new(Graph::complete(4)), None, 0, 1, 1.0);
        assert!(k4.valid_actions().unwrap().is_empty());
    }

    #[test]
    fn first_step_sets_stub_without_reward() {
        let env = exact_env(2);
        let mut rng = seeded(0);
        let s0 = env.reset(Graph::path(4), &mut rng).unwrap();
        let out = env.step(&s0, 3, &mut rng).unwrap();
        assert_eq!(out.next_state.stub(), Some(3));
        assert_eq!(out.next_state.graph(), &Graph::path(4));
        assert_eq!(out.reward, 0.0);
        assert!(!out.terminal);
    }

    #[test]
    fn single_edge_budget_terminates_with_improvement() {
        let env = exact_env(1);
        let mut rng = seeded(0);
        let s0 = env.reset(Graph::path(3), &mut rng).unwrap();
        let s1 = env.step(&s0, 2, &mut rng).unwrap().next_state;
        let out = env.step(&s1, 0, &mut rng).unwrap();
        assert!(out.terminal);
        assert_eq!(out.next_state.graph(), &Graph::complete(3));
        assert!((out.reward - (1.0 - 7.0 / 9.0)).abs() < 1e-12);
        assert_eq!(
            env.step(&out.next_state, 1, &mut rng).unwrap_err(),
            Error::TerminalState
        );
    }

    #[test]
    fn invalid_actions_rejected() {
        let env = exact_env(1);
        let mut rng = seeded(0);
        let s0 = env.reset(Graph::path(3), &mut rng).unwrap();
        assert_eq!(
            env.step(&s0, 1, &mut rng).unwrap_err(),
            Error::InvalidAction(1)
        );
        let s1 = env.step(&s0, 0, &mut rng).unwrap().next_state;
        assert_eq!(
            env.step(&s1, 0, &mut rng).unwrap_err(),
            Error::InvalidAction(0)
        );
        assert_eq!(
            env.step(&s1, 1, &mut rng).unwrap_err(),
            Error::InvalidAction(1)
        );
    }

    #[test]
    fn config_validation() {
        let cfg = EpisodeConfig {
            objective: Objective::Random,
            budget: 0,
            n_sims: 10,
        };
        assert!(cfg.validate(&Graph::path(4)).is_err());
        let cfg = EpisodeConfig { budget: 4, ..cfg };
        assert!(cfg.validate(&Graph::path(4)).is_err());
        let cfg = EpisodeConfig { budget: 3, ..cfg };
        assert!(cfg.validate(&Graph::path(4)).is_ok());
        assert!(GraphImprovementEnv::new(Arc::new(cfg.measure()), 0).is_err());
    }

    #[test]
    fn reset_rejects_disconnected_and_overfull_budget() {
        let env = exact_env(1);
        let mut rng = seeded(0);
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(env.reset(split, &mut rng).unwrap_err(), Error::Disconnected);
        assert!(env.reset(Graph::complete(3), &mut rng).is_err());
    }

    #[test]
    fn random_policy_on_p3_builds_triangle() {
        let env = exact_env(1);
        let mut rng = seeded(5);
        let out = run_episode(&env, &Graph::path(3), &mut RandomActionPolicy, &mut rng).unwrap();
        assert_eq!(out.final_graph, Graph::complete(3));
        assert!((out.total_reward - 2.0 / 9.0).abs() < 1e-12);
        assert_eq!(out.trajectory.len(), 2);
        assert_eq!(out.trajectory[0].reward, 0.0);
    }

    #[test]
    fn deterministic_policy_replays_identically() {
        let env = exact_env(3);
        let a = run_episode(&env, &Graph::path(6), &mut FirstValidPolicy, &mut seeded(1)).unwrap();
        let b = run_episode(&env, &Graph::path(6), &mut FirstValidPolicy, &mut seeded(2)).unwrap();
        assert_eq!(a.final_graph, b.final_graph);
        assert_eq!(a.added_edges, b.added_edges);
        assert_eq!(a.trajectory_log(), b.trajectory_log());
        assert!(a
            .trajectory_log()
            .starts_with("step,stub,action,reward\n0,-,0,0\n1,0,2,0\n"));
    }

    #[test]
    fn budget_from_percent_rounds() {
        assert_eq!(budget_from_percent(20, 1.0), 2);
        assert_eq!(budget_from_percent(20, 2.0), 4);
        assert_eq!(budget_from_percent(20, 5.0), 10);
    }
}
