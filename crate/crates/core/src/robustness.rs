//! Critical-fraction robustness under random and degree-targeted node removal.
//!
//! The critical fraction of a removal order is `j / N`, where `j` is the first
//! (1-based) removal after which the live nodes form more than one component.
//! Orders that never split the graph (complete graphs, for instance) score 1.0.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RemovalKind {
    Random,
    Targeted,
}

/// How equal-degree nodes are ordered in a targeted attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TieBreak {
    UniformRandom,
    DescendingLabel,
    AscendingLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RemovalStrategy {
    pub kind: RemovalKind,
    /// Ignored for [`RemovalKind::Random`].
    pub tie_break: TieBreak,
}

impl RemovalStrategy {
    pub const RANDOM: Self = Self {
        kind: RemovalKind::Random,
        tie_break: TieBreak::UniformRandom,
    };
    pub const TARGETED: Self = Self {
        kind: RemovalKind::Targeted,
        tie_break: TieBreak::UniformRandom,
    };
    pub const TARGETED_BY_LABEL: Self = Self {
        kind: RemovalKind::Targeted,
        tie_break: TieBreak::DescendingLabel,
    };
}

/// The two robustness objectives an agent can optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Random,
    Targeted,
}

impl Objective {
    pub fn strategy(self) -> RemovalStrategy {
        match self {
            Objective::Random => RemovalStrategy::RANDOM,
            Objective::Targeted => RemovalStrategy::TARGETED,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::Random => "random",
            Objective::Targeted => "targeted",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" | "f_random" => Ok(Objective::Random),
            "targeted" | "f_targeted" => Ok(Objective::Targeted),
            other => Err(Error::InvalidConfig(format!("unknown objective {other:?}"))),
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Simulation count used for synthetic graphs: two per node.
pub fn default_n_sims(num_nodes: usize) -> usize {
    2 * num_nodes
}

/// Simulation count used for real-world graphs.
pub const REAL_WORLD_N_SIMS: usize = 40;

/// Mean critical fraction with its standard error over `n_sims` simulations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_sims: usize,
}

impl RobustnessEstimate {
    /// Summary of critical fractions `j / num_nodes`, given the integer `j`s.
    ///
    /// Sums are kept in integers, so a constant sample gives an exact mean
    /// and a zero standard error.
    pub fn from_critical_indices(indices: &[usize], num_nodes: usize) -> Self {
        let n = indices.len() as u128;
        let sum: u128 = indices.iter().map(|&j| j as u128).sum();
        let sum_sq: u128 = indices.iter().map(|&j| (j as u128).pow(2)).sum();
        let scale = num_nodes as f64;
        let mean = sum as f64 / (n as f64 * scale);
        let std_error = if n > 1 {
            // n * sum_sq - sum^2 is exact and nonnegative
            let spread = (n * sum_sq - sum * sum) as f64;
            (spread / (n * n * (n - 1)) as f64).sqrt() / scale
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            n_sims: indices.len(),
        }
    }

    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            n_sims: n,
        }
    }
}

/// Removal order over the live nodes of `g`.
///
/// Targeted orders use degrees of the intact graph; they are not recomputed as
/// nodes are removed.
pub fn generate_permutation<R: Rng + ?Sized>(
    g: &Graph,
    strategy: RemovalStrategy,
    rng: &mut R,
) -> Vec<usize> {
    let mut order: Vec<usize> = g.live_nodes().collect();
    match strategy.kind {
        RemovalKind::Random => order.shuffle(rng),
        RemovalKind::Targeted => {
            order.sort_unstable_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(b.cmp(&a)));
            for group in order.chunk_by_mut(|&a, &b| g.degree(a) == g.degree(b)) {
                match strategy.tie_break {
                    TieBreak::UniformRandom => group.shuffle(rng),
                    TieBreak::DescendingLabel => {}
                    TieBreak::AscendingLabel => group.reverse(),
                }
            }
        }
    }
    order
}

/// Reusable buffers for the reverse union-find sweep.
#[derive(Default)]
struct Sweep {
    parent: Vec<usize>,
    position: Vec<usize>,
}

impl Sweep {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// First 1-based removal index that leaves more than one component.
    ///
    /// Nodes are re-inserted in reverse removal order; the component count of
    /// every suffix `perm[j..]` falls out of one union-find pass.
    fn critical_index(&mut self, g: &Graph, perm: &[usize]) -> Option<usize> {
        let n_total = g.num_nodes();
        self.parent.clear();
        self.parent.extend(0..n_total);
        self.position.clear();
        self.position.resize(n_total, usize::MAX);
        for (k, &v) in perm.iter().enumerate() {
            self.position[v] = k;
        }
        let mut components = 0usize;
        let mut first = None;
        for k in (1..perm.len()).rev() {
            let v = perm[k];
            components += 1;
            for &w in g.neighbors(v) {
                if self.position[w] > k && self.position[w] != usize::MAX {
                    let (rv, rw) = (self.find(v), self.find(w));
                    if rv != rw {
                        self.parent[rv] = rw;
                        components -= 1;
                    }
                }
            }
            // `components` now counts the components of perm[k..], i.e. after k removals
            if components > 1 {
                first = Some(k);
            }
        }
        first
    }
}

fn validate_permutation(g: &Graph, perm: &[usize]) -> Result<()> {
    if perm.len() != g.num_live_nodes() {
        return Err(Error::InvalidPermutation);
    }
    let mut seen = vec![false; g.num_nodes()];
    for &v in perm {
        if !g.is_live(v) || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidPermutation);
        }
    }
    Ok(())
}

/// Critical fraction of removing nodes in `perm` order.
pub fn critical_fraction(g: &Graph, perm: &[usize]) -> Result<f64> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    validate_permutation(g, perm)?;
    let n = perm.len();
    Ok(match Sweep::default().critical_index(g, perm) {
        Some(j) => j as f64 / n as f64,
        None => 1.0,
    })
}

/// Monte Carlo estimate drawing a master seed from `rng`.
pub fn estimate_robustness<R: Rng + ?Sized>(
    g: &Graph,
    strategy: RemovalStrategy,
    n_sims: usize,
    rng: &mut R,
) -> Result<RobustnessEstimate> {
    estimate_robustness_seeded(g, strategy, n_sims, rng.random(), true)
}

/// Monte Carlo estimate where simulation `i` uses stream `i` of `master_seed`.
///
/// Serial and parallel execution give bit-identical results.
pub fn estimate_robustness_seeded(
    g: &Graph,
    strategy: RemovalStrategy,
    n_sims: usize,
    master_seed: u64,
    parallel: bool,
) -> Result<RobustnessEstimate> {
    if n_sims == 0 {
        return Err(Error::NoSimulations);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.num_live_nodes();
    let simulate = |sweep: &mut Sweep, i: usize| {
        let mut rng = rng::stream(master_seed, i as u64);
        let perm = generate_permutation(g, strategy, &mut rng);
        sweep.critical_index(g, &perm).unwrap_or(n)
    };
    let samples: Vec<usize> = if parallel && n_sims >= 64 {
        (0..n_sims)
            .into_par_iter()
            .with_min_len(32)
            .map_init(Sweep::default, simulate)
            .collect()
    } else {
        let mut sweep = Sweep::default();
        (0..n_sims).map(|i| simulate(&mut sweep, i)).collect()
    };
    Ok(RobustnessEstimate::from_critical_indices(&samples, n))
}

/// Largest graph the exhaustive oracle accepts.
pub const EXACT_MAX_NODES: usize = 8;

/// First 1-based removal index that disconnects `g`, found by literally
/// removing nodes and recounting components after each step.
pub fn critical_index_by_removal(g: &Graph, perm: &[usize]) -> Option<usize> {
    let mut work = g.clone();
    for (j, &v) in perm.iter().enumerate() {
        work.remove_node(v)
            .expect("permutation nodes are live and distinct");
        if work.num_connected_components() > 1 {
            return Some(j + 1);
        }
    }
    None
}

fn for_each_permutation(items: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        f(items);
        return;
    }
    // Heap's algorithm
    for i in 0..k - 1 {
        for_each_permutation(items, k - 1, f);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    for_each_permutation(items, k - 1, f);
}

/// Visits every ordering of `groups` concatenated, permuting within each group only.
fn for_each_grouped(
    groups: &mut [Vec<usize>],
    prefix: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    let Some((first, rest)) = groups.split_first_mut() else {
        f(prefix);
        return;
    };
    let len = first.len();
    let mut group = first.clone();
    for_each_permutation(&mut group, len, &mut |ordering: &[usize]| {
        let mark = prefix.len();
        prefix.extend_from_slice(ordering);
        for_each_grouped(rest, prefix, f);
        prefix.truncate(mark);
    });
}

/// Exact expected critical fraction by enumerating every removal order the
/// strategy can produce, each weighted equally.
pub fn exact_robustness(g: &Graph, strategy: RemovalStrategy) -> Result<Ratio<u64>> {
    let n = g.num_live_nodes();
    if n > EXACT_MAX_NODES {
        return Err(Error::TooLarge {
            got: n,
            max: EXACT_MAX_NODES,
        });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut total: u64 = 0;
    let mut count: u64 = 0;
    let mut score = |perm: &[usize]| {
        total += critical_index_by_removal(g, perm).unwrap_or(n) as u64;
        count += 1;
    };
    let mut nodes: Vec<usize> = g.live_nodes().collect();
    match (strategy.kind, strategy.tie_break) {
        (RemovalKind::Random, _) => for_each_permutation(&mut nodes, n, &mut score),
        (RemovalKind::Targeted, TieBreak::DescendingLabel | TieBreak::AscendingLabel) => {
            let mut rng = rng::seeded(0);
            score(&generate_permutation(g, strategy, &mut rng));
        }
        (RemovalKind::Targeted, TieBreak::UniformRandom) => {
            nodes.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
            let mut groups: Vec<Vec<usize>> = nodes
                .chunk_by(|&a, &b| g.degree(a) == g.degree(b))
                .map(<[usize]>::to_vec)
                .collect();
            for_each_grouped(&mut groups, &mut Vec::with_capacity(n), &mut score);
        }
    }
    Ok(Ratio::new(total, n as u64 * count))
}

/// Anything that can score a graph's robustness; `seed` feeds any sampling.
pub trait RobustnessMeasure: Send + Sync {
    fn evaluate(&self, g: &Graph, seed: u64) -> Result<f64>;
}

/// Monte Carlo estimator with a fixed simulation count.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarlo {
    pub strategy: RemovalStrategy,
    pub n_sims: usize,
}

impl MonteCarlo {
    pub fn new(objective: Objective, n_sims: usize) -> Self {
        Self {
            strategy: objective.strategy(),
            n_sims,
        }
    }
}

impl RobustnessMeasure for MonteCarlo {
    fn evaluate(&self, g: &Graph, seed: u64) -> Result<f64> {
        Ok(estimate_robustness_seeded(g, self.strategy, self.n_sims, seed, true)?.mean)
    }
}

/// Exhaustive oracle, for graphs of at most [`EXACT_MAX_NODES`] nodes.
#[derive(Debug, Clone, Copy)]
pub struct ExactOracle {
    pub strategy: RemovalStrategy,
}

impl RobustnessMeasure for ExactOracle {
    fn evaluate(&self, g: &Graph, _seed: u64) -> Result<f64> {
        let r = exact_robustness(g, self.strategy)?;
        Ok(*r.numer() as f64 / *r.denom() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: u64, b: u64) -> Ratio<u64> {
        Ratio::new(a, b)
    }

    #[test]
    fn targeted_star_removes_center_first() {
        let g = Graph::star(5);
        let mut rng = rng::seeded(1);
        for s in [
            RemovalStrategy::TARGETED,
            RemovalStrategy::TARGETED_BY_LABEL,
        ] {
            assert_eq!(generate_permutation(&g, s, &mut rng)[0], 0);
        }
    }

    #[test]
    fn targeted_path_descending_label() {
        let mut rng = rng::seeded(1);
        let perm = generate_permutation(
            &Graph::path(3),
            RemovalStrategy::TARGETED_BY_LABEL,
            &mut rng,
        );
        assert_eq!(perm, vec![1, 2, 0]);
    }

    #[test]
    fn random_permutation_of_triangle_is_uniform() {
        // chi-square over the 6 orderings of K_3, 5 degrees of freedom
        let g = Graph::complete(3);
        let mut rng = rng::seeded(42);
        let draws = 60_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            *counts
                .entry(generate_permutation(&g, RemovalStrategy::RANDOM, &mut rng))
                .or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = draws as f64 / 6.0;
        let sigma = (draws as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        let mut chi2 = 0.0;
        for &c in counts.values() {
            assert!((c as f64 - expected).abs() < 3.0 * sigma);
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // 99.9% quantile of chi-square with 5 dof
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn critical_fraction_examples() {
        assert_eq!(
            critical_fraction(&Graph::path(3), &[1, 0, 2]).unwrap(),
            1.0 / 3.0
        );
        assert_eq!(
            critical_fraction(&Graph::complete(4), &[2, 0, 3, 1]).unwrap(),
            1.0
        );
        assert_eq!(
            critical_fraction(&Graph::star(5), &[1, 2, 3, 4, 0]).unwrap(),
            1.0
        );
        assert_eq!(
            critical_fraction(&Graph::star(5), &[1, 0, 2, 3, 4]).unwrap(),
            0.4
        );
    }

    #[test]
    fn critical_fraction_rejects_bad_input() {
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            critical_fraction(&split, &[0, 1, 2, 3]),
            Err(Error::Disconnected)
        );
        assert_eq!(
            critical_fraction(&Graph::path(3), &[0, 0, 1]),
            Err(Error::InvalidPermutation)
        );
        assert_eq!(
            critical_fraction(&Graph::path(3), &[0, 1]),
            Err(Error::InvalidPermutation)
        );
    }

    #[test]
    fn star_targeted_estimate_is_exact() {
        let est =
            estimate_robustness_seeded(&Graph::star(5), RemovalStrategy::TARGETED, 500, 3, true)
                .unwrap();
        assert_eq!(est.mean, 0.2);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.n_sims, 500);
    }

    #[test]
    fn path_targeted_estimate_is_exact() {
        let est =
            estimate_robustness_seeded(&Graph::path(3), RemovalStrategy::TARGETED, 1000, 9, true)
                .unwrap();
        assert_eq!(est.mean, 1.0 / 3.0);
    }

    #[test]
    fn path_random_estimate_matches_enumeration() {
        let est =
            estimate_robustness_seeded(&Graph::path(3), RemovalStrategy::RANDOM, 60_000, 11, true)
                .unwrap();
        assert!(
            (est.mean - 7.0 / 9.0).abs() <= 3.0 * est.std_error,
            "{est:?}"
        );
    }

    #[test]
    fn serial_and_parallel_agree() {
        let g = Graph::cycle(9);
        let a = estimate_robustness_seeded(&g, RemovalStrategy::RANDOM, 1000, 5, true).unwrap();
        let b = estimate_robustness_seeded(&g, RemovalStrategy::RANDOM, 1000, 5, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn estimator_errors() {
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            estimate_robustness_seeded(&split, RemovalStrategy::RANDOM, 10, 0, false),
            Err(Error::Disconnected)
        );
        assert_eq!(
            estimate_robustness_seeded(&Graph::path(3), RemovalStrategy::RANDOM, 0, 0, false),
            Err(Error::NoSimulations)
        );
    }

    #[test]
    fn exact_values() {
        assert_eq!(
            exact_robustness(&Graph::path(3), RemovalStrategy::RANDOM).unwrap(),
            r(7, 9)
        );
        assert_eq!(
            exact_robustness(&Graph::complete(4), RemovalStrategy::RANDOM).unwrap(),
            r(1, 1)
        );
        assert_eq!(
            exact_robustness(&Graph::star(5), RemovalStrategy::TARGETED).unwrap(),
            r(1, 5)
        );
        assert_eq!(
            exact_robustness(&Graph::path(3), RemovalStrategy::TARGETED).unwrap(),
            r(1, 3)
        );
        // C_4: the first removal never splits a cycle; the second splits it
        // iff it removes the node opposite the first (1/3 of orders), else
        // the remaining P_2 never splits. 1/3 * 2/4 + 2/3 * 1 = 5/6.
        assert_eq!(
            exact_robustness(&Graph::cycle(4), RemovalStrategy::RANDOM).unwrap(),
            r(5, 6)
        );
    }

    #[test]
    fn exact_rejects_large_graphs() {
        assert_eq!(
            exact_robustness(&Graph::path(9), RemovalStrategy::RANDOM),
            Err(Error::TooLarge { got: 9, max: 8 })
        );
    }

    #[test]
    fn union_find_sweep_matches_literal_removal() {
        let g = Graph::from_edges(
            7,
            [
                (0, 1),
                (1, 2),
                (2, 0),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 3),
                (5, 6),
            ],
        )
        .unwrap();
        let mut nodes: Vec<usize> = (0..7).collect();
        let mut sweep = Sweep::default();
        for_each_permutation(&mut nodes, 7, &mut |p: &[usize]| {
            assert_eq!(
                sweep.critical_index(&g, p),
                critical_index_by_removal(&g, p),
                "{p:?}"
            );
        });
    }
}
