#![allow(dead_code)]

use netrobust_core::rng::seeded;
use netrobust_core::{Graph, NodePair};
use rand::Rng;

/// Random spanning tree plus up to `extra` further edges, so always connected.
pub fn connected_graph(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = seeded(seed);
    let mut g = Graph::empty(n);
    for v in 1..n {
        g.add_edge(NodePair::new(rng.random_range(0..v), v).unwrap())
            .unwrap();
    }
    for _ in 0..extra {
        let free = g.non_edges();
        if free.is_empty() {
            break;
        }
        g.add_edge(free[rng.random_range(0..free.len())]).unwrap();
    }
    g
}

/// Every connected labeled graph on `n` nodes.
pub fn all_connected(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let chosen = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1);
            Graph::from_edges(n, chosen.map(|(_, &p)| p)).unwrap()
        })
        .filter(Graph::is_connected)
        .collect()
}
