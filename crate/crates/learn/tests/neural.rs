use std::sync::Arc;

use ndarray::Array2;
use netrobust_core::datagen::generate_er_connected;
use netrobust_core::env::EnvState;
use netrobust_core::rng::seeded;
use netrobust_core::Graph;
use netrobust_learn::neural::{
    embed, grad_mse, grad_td_loss, node_features, q_values, NetConfig, NetworkParams, Parameters,
    RegressorParams, TdSample,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

const FD_STEP: f64 = 1e-5;
const FD_REL_TOL: f64 = 1e-4;
/// Below this both sides are round-off.
const FD_ABS_FLOOR: f64 = 1e-8;

fn random_graph(n: usize, seed: u64) -> Graph {
    let mut rng = seeded(seed);
    let max = n * (n - 1) / 2;
    // leave at least one absent edge so a stub has partners
    let m = rng.random_range(n - 1..max);
    generate_er_connected(n, m, &mut rng).unwrap()
}

/// A non-terminal state; with `stub_set`, the stub has at least one valid partner.
fn random_state(g: Graph, stub_set: bool, seed: u64) -> EnvState {
    let g = Arc::new(g);
    if !stub_set {
        return EnvState::from_parts(g, None, 0, 2, 0.0);
    }
    let base = EnvState::from_parts(g.clone(), None, 0, 2, 0.0);
    let stubs = base.valid_actions().unwrap();
    let stub = stubs[seeded(seed).random_range(0..stubs.len())];
    EnvState::from_parts(g, Some(stub), 1, 2, 0.0)
}

fn close(analytic: f64, numeric: f64) -> bool {
    let scale = analytic.abs().max(numeric.abs());
    (analytic - numeric).abs() <= FD_REL_TOL * scale || scale < FD_ABS_FLOOR
}

/// Central differences at `FD_STEP` against the analytic gradient.
///
/// A coordinate whose probe window straddles a relu kink has no meaningful
/// finite difference at this step; such windows show up as disagreement
/// between the step and a ten times smaller one. Those coordinates are
/// skipped, and at most 5% of an instance may be.
fn finite_difference<P: Parameters<f64>>(
    p: &P,
    analytic: &P,
    loss: impl Fn(&P) -> f64,
) -> Result<(), TestCaseError> {
    let central = |ti: usize, k: usize, h: f64| {
        let mut plus = p.clone();
        let mut minus = p.clone();
        plus.tensors_mut()[ti].as_slice_mut().unwrap()[k] += h;
        minus.tensors_mut()[ti].as_slice_mut().unwrap()[k] -= h;
        (loss(&plus) - loss(&minus)) / (2.0 * h)
    };
    let mut skipped = 0;
    let mut total = 0;
    for (ti, name) in p.names().iter().enumerate() {
        for k in 0..p.tensors()[ti].len() {
            total += 1;
            let a = analytic.tensors()[ti].as_slice().unwrap()[k];
            let numeric = central(ti, k, FD_STEP);
            if close(a, numeric) {
                continue;
            }
            let fine = central(ti, k, FD_STEP / 10.0);
            prop_assert!(
                !close(numeric, fine),
                "{name}[{k}]: analytic {a:e} vs numeric {numeric:e}"
            );
            skipped += 1;
        }
    }
    prop_assert!(
        skipped * 20 <= total,
        "{skipped} of {total} coordinates straddle a kink"
    );
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn td_gradient_matches_finite_differences(
        n in 4usize..=8,
        d in prop::sample::select(vec![3usize, 8]),
        rounds in 1usize..=3,
        stub_set in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let cfg = NetConfig { embed_dim: d, hidden: 5, rounds };
        let p = NetworkParams::<f64>::glorot_init(cfg, &mut seeded(seed)).unwrap();
        let s = random_state(random_graph(n, seed ^ 1), stub_set, seed ^ 2);
        let valid = s.valid_actions().unwrap();
        let action = valid[seeded(seed ^ 3).random_range(0..valid.len())];
        let target = 0.37;
        let batch = [TdSample { state: &s, action, target }];
        let out = grad_td_loss(&batch, &p).unwrap();
        finite_difference(&p, &out.grad, |q| grad_td_loss(&batch, q).unwrap().loss)?;
    }

    #[test]
    fn regressor_gradient_matches_finite_differences(
        n in 4usize..=8,
        d in prop::sample::select(vec![3usize, 8]),
        rounds in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let cfg = NetConfig { embed_dim: d, hidden: 5, rounds };
        let p = RegressorParams::<f64>::glorot_init(cfg, &mut seeded(seed)).unwrap();
        let g1 = random_graph(n, seed ^ 1);
        let g2 = random_graph(n, seed ^ 5);
        let batch = [(&g1, 0.2), (&g2, 0.45)];
        let out = grad_mse(&batch, &p).unwrap();
        finite_difference(&p, &out.grad, |q| grad_mse(&batch, q).unwrap().loss)?;
    }

    #[test]
    fn embedding_is_permutation_equivariant(n in 3usize..=10, stub_set in any::<bool>(), seed in any::<u64>()) {
        let cfg = NetConfig { embed_dim: 6, hidden: 4, rounds: 3 };
        let p = NetworkParams::<f64>::glorot_init(cfg, &mut seeded(seed)).unwrap();
        let s = random_state(random_graph(n, seed ^ 1), stub_set, seed ^ 2);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut seeded(seed ^ 4));
        let g2 = s.graph().relabel(&perm).unwrap();
        let s2 = EnvState::from_parts(Arc::new(g2), s.stub().map(|v| perm[v]), s.step_index(), 2, 0.0);

        let e1 = embed(s.graph(), &node_features(&s), &p.theta1, &p.theta2, cfg.rounds).unwrap();
        let e2 = embed(s2.graph(), &node_features(&s2), &p.theta1, &p.theta2, cfg.rounds).unwrap();
        for v in 0..n {
            for j in 0..cfg.embed_dim {
                prop_assert!((e1.nodes[[v, j]] - e2.nodes[[perm[v], j]]).abs() < 1e-10);
            }
        }
        for j in 0..cfg.embed_dim {
            prop_assert!((e1.graph[j] - e2.graph[j]).abs() < 1e-10);
            let pooled: f64 = e1.nodes.column(j).iter().sum();
            prop_assert_eq!(pooled, e1.graph[j]);
        }
        prop_assert!(e1.nodes.iter().all(|&x| x >= 0.0));

        let valid = s.valid_actions().unwrap();
        let q1 = q_values(&s, &valid, &p).unwrap();
        let mapped: Vec<usize> = valid.iter().map(|&a| perm[a]).collect();
        let q2 = q_values(&s2, &mapped, &p).unwrap();
        for (a, b) in q1.iter().zip(&q2) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let best = |q: &[f64]| (0..q.len()).max_by(|&i, &j| q[i].total_cmp(&q[j])).unwrap();
        let (i1, i2) = (best(&q1), best(&q2));
        let gap = q1.iter().filter(|&&x| x != q1[i1]).map(|x| q1[i1] - x).fold(f64::INFINITY, f64::min);
        if gap > 1e-8 && q1.iter().filter(|&&x| x == q1[i1]).count() == 1 {
            prop_assert_eq!(mapped[i1], mapped[i2]);
        }
    }
}

#[test]
fn zero_params_embed_to_zero_for_any_graph() {
    let cfg = NetConfig::SYNTHETIC;
    let p = NetworkParams::<f64>::zeros(cfg);
    let s = random_state(random_graph(12, 3), true, 4);
    let e = embed(
        s.graph(),
        &node_features(&s),
        &p.theta1,
        &p.theta2,
        cfg.rounds,
    )
    .unwrap();
    assert_eq!(e.nodes, Array2::zeros((12, 64)));
}
