mod common;

use std::collections::HashSet;
use std::sync::Arc;

use common::connected_graph;
use netrobust_core::env::{run_episode, GraphImprovementEnv, RandomActionPolicy};
use netrobust_core::rng::seeded;
use netrobust_core::robustness::{estimate_robustness_seeded, MonteCarlo, Objective};
use proptest::prelude::*;

proptest! {
    #[test]
    fn episode_adds_exactly_budget_new_edges(
        n in 4usize..=14,
        extra in 0usize..12,
        budget in 1usize..=4,
        targeted in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let g0 = connected_graph(n, extra, seed);
        prop_assume!(g0.num_non_edges() >= budget);
        let objective = if targeted { Objective::Targeted } else { Objective::Random };
        let env = GraphImprovementEnv::new(Arc::new(MonteCarlo::new(objective, 2 * n)), budget).unwrap();
        let out = run_episode(&env, &g0, &mut RandomActionPolicy, &mut seeded(seed)).unwrap();

        prop_assert_eq!(out.added_edges.len(), budget);
        let distinct: HashSet<_> = out.added_edges.iter().collect();
        prop_assert_eq!(distinct.len(), budget);
        prop_assert_eq!(out.final_graph.num_edges(), g0.num_edges() + budget);
        for e in g0.edges() {
            prop_assert!(out.final_graph.has_edge(e.u(), e.v()));
        }
        for e in &out.added_edges {
            prop_assert!(!g0.has_edge(e.u(), e.v()));
            prop_assert!(out.final_graph.has_edge(e.u(), e.v()));
        }

        prop_assert_eq!(out.trajectory.len(), 2 * budget);
        let (last, rest) = out.trajectory.split_last().unwrap();
        prop_assert!(rest.iter().all(|r| r.reward == 0.0));
        prop_assert_eq!(last.reward, out.total_reward);
    }
}

#[test]
fn random_objective_rewards_are_not_significantly_negative() {
    let sims = 200;
    for seed in 0..60u64 {
        let n = 6 + (seed % 10) as usize;
        let g0 = connected_graph(n, (seed % 9) as usize, seed);
        let env = GraphImprovementEnv::new(Arc::new(MonteCarlo::new(Objective::Random, sims)), 3)
            .unwrap();
        let out = run_episode(&env, &g0, &mut RandomActionPolicy, &mut seeded(seed)).unwrap();
        let s = Objective::Random.strategy();
        let se0 = estimate_robustness_seeded(&g0, s, sims, seed ^ 11, true)
            .unwrap()
            .std_error;
        let se1 = estimate_robustness_seeded(&out.final_graph, s, sims, seed ^ 12, true)
            .unwrap()
            .std_error;
        let combined = (se0 * se0 + se1 * se1).sqrt();
        assert!(
            out.total_reward >= -3.0 * combined,
            "seed {seed}: {} vs {combined}",
            out.total_reward
        );
    }
}
