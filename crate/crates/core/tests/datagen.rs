use netrobust_core::datagen::{prepare_edge_list, Family, GeneratorSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_graphs_are_connected_simple_and_sized(n in 10usize..=40, er in any::<bool>(), seed in any::<u64>()) {
        let family = if er { Family::Er } else { Family::Ba };
        let spec = GeneratorSpec::new(family, n, seed);
        let g = spec.generate().unwrap();
        prop_assert!(g.is_connected());
        prop_assert_eq!(g.num_nodes(), n);
        prop_assert_eq!(g.num_live_nodes(), n);
        let want = if er { spec.er_edges() } else { spec.ba_edges() };
        prop_assert_eq!(g.num_edges(), want);
        for v in 0..n {
            let mut adj = g.neighbors(v).to_vec();
            prop_assert!(!adj.contains(&v));
            adj.sort_unstable();
            adj.dedup();
            prop_assert_eq!(adj.len(), g.degree(v));
        }
        prop_assert_eq!(spec.generate().unwrap(), g);
    }

    #[test]
    fn prepared_graphs_are_contiguous_and_connected(pairs in prop::collection::vec((0usize..1000, 0usize..1000), 1..60)) {
        let text: String = pairs.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
        let Ok(p) = prepare_edge_list(&text, 2, usize::MAX) else {
            return Ok(());
        };
        prop_assert!(p.graph.is_connected());
        prop_assert_eq!(p.original_labels.len(), p.graph.num_nodes());
        for e in p.graph.edges() {
            let (a, b) = (p.original_labels[e.u()], p.original_labels[e.v()]);
            prop_assert!(pairs.contains(&(a, b)) || pairs.contains(&(b, a)));
        }
    }
}

#[test]
fn ba_twenty_nodes_has_thirty_seven_edges() {
    for seed in 0..20 {
        assert_eq!(
            GeneratorSpec::new(Family::Ba, 20, seed)
                .generate()
                .unwrap()
                .num_edges(),
            37
        );
    }
}

#[test]
fn er_twenty_nodes_has_thirty_eight_edges() {
    for seed in 0..20 {
        assert_eq!(
            GeneratorSpec::new(Family::Er, 20, seed)
                .generate()
                .unwrap()
                .num_edges(),
            38
        );
    }
}

#[test]
fn fixed_seed_gives_fixed_edges() {
    // pinned so drift in the generator or its random streams shows up
    let edges = |f| {
        let g = GeneratorSpec::new(f, 10, 42).generate().unwrap();
        g.edges().iter().map(|e| (e.u(), e.v())).collect::<Vec<_>>()
    };
    assert_eq!(
        edges(Family::Ba),
        [
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 2),
            (1, 4),
            (1, 5),
            (1, 7),
            (1, 8),
            (2, 3),
            (2, 5),
            (2, 6),
            (2, 7),
            (2, 8),
            (2, 9),
            (3, 4),
            (4, 6),
            (4, 9),
        ]
    );
    assert_eq!(
        edges(Family::Er),
        [
            (0, 6),
            (0, 9),
            (1, 7),
            (2, 3),
            (3, 5),
            (3, 7),
            (4, 6),
            (4, 8),
            (5, 9)
        ]
    );
}
