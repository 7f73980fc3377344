//! Synthetic graph generators and real-world edge-list preparation.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{parse_edge_pairs, Graph, NodePair};
use crate::rng::{derive_seed, seeded};

/// Connectivity-rejection attempts before the ER generator gives up.
pub const ER_REJECTION_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Uniform over connected graphs with a fixed edge count.
    Er,
    /// Preferential attachment.
    Ba,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Er => "er",
            Family::Ba => "ba",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(Family::Er),
            "ba" => Ok(Family::Ba),
            other => Err(Error::InvalidConfig(format!(
                "unknown graph family {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    /// ER edge count as a fraction of all `n(n-1)/2` pairs.
    pub er_edge_fraction: f64,
    /// BA attachments per arriving node.
    pub ba_m: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            er_edge_fraction: 0.2,
            ba_m: 2,
            seed,
        }
    }

    /// ER edge count: `round(fraction * n(n-1)/2)`.
    pub fn er_edges(&self) -> usize {
        (self.er_edge_fraction * (self.n * self.n.saturating_sub(1)) as f64 / 2.0).round() as usize
    }

    /// BA edge count: seed clique plus `ba_m` edges per later node.
    pub fn ba_edges(&self) -> usize {
        self.ba_m * self.ba_m.saturating_sub(1) / 2 + (self.n - self.ba_m) * self.ba_m
    }

    pub fn generate(&self) -> Result<Graph> {
        let mut rng = seeded(self.seed);
        match self.family {
            Family::Er => generate_er_connected(self.n, self.er_edges(), &mut rng),
            Family::Ba => generate_ba(self.n, self.ba_m, &mut rng),
        }
    }

    /// `count` graphs; graph `i` uses seed `derive_seed(self.seed, i)`.
    pub fn generate_many(&self, count: usize) -> Result<Vec<Graph>> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                GeneratorSpec {
                    seed: derive_seed(self.seed, i as u64),
                    ..*self
                }
                .generate()
            })
            .collect()
    }
}

/// Uniform graph on `n` nodes with exactly `m` edges, resampled until connected.
pub fn generate_er_connected<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    let total = n * n.saturating_sub(1) / 2;
    if n == 0 || m + 1 < n {
        return Err(Error::Unsatisfiable(format!(
            "{m} edges cannot connect {n} nodes"
        )));
    }
    if m > total {
        return Err(Error::Unsatisfiable(format!(
            "{m} edges exceed the {total} possible pairs"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    for _ in 0..ER_REJECTION_CAP {
        let chosen = index::sample(rng, total, m);
        let g = Graph::from_edges(n, chosen.iter().map(|k| pairs[k]))?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::RejectionCapExceeded(ER_REJECTION_CAP))
}

/// Preferential attachment from an `m`-clique seed.
///
/// Each arriving node links to `m` distinct existing nodes, drawn one at a
/// time proportionally to degree and redrawn on repeats.
pub fn generate_ba<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    if m == 0 || n <= m {
        return Err(Error::Unsatisfiable(format!(
            "attachment count {m} must be in 1..{n}"
        )));
    }
    let mut g = Graph::empty(n);
    // every edge endpoint once: uniform draws are degree-proportional
    let mut endpoints = Vec::with_capacity(2 * m * n);
    for u in 0..m {
        for v in u + 1..m {
            g.add_edge(NodePair::new(u, v)?)?;
            endpoints.extend([u, v]);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in m..n {
        targets.clear();
        while targets.len() < m {
            let t = if endpoints.is_empty() {
                rng.random_range(0..v)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            g.add_edge(NodePair::new(t, v)?)?;
            endpoints.extend([t, v]);
        }
    }
    Ok(g)
}

/// Real-world graph after largest-component extraction and relabeling.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    pub graph: Graph,
    /// Source label of each node, indexed by the new contiguous label.
    pub original_labels: Vec<usize>,
}

impl PreparedGraph {
    /// `node,original` CSV pairing new labels with source labels.
    pub fn label_map_csv(&self) -> String {
        let mut out = String::from("node,original\n");
        for (i, o) in self.original_labels.iter().enumerate() {
            out.push_str(&format!("{i},{o}\n"));
        }
        out
    }
}

/// Parses an edge list with arbitrary integer labels, keeps its largest
/// connected component, and checks `min_n <= |V| <= max_n`.
///
/// Labels are assigned in order of first appearance in the file.
pub fn prepare_edge_list(text: &str, min_n: usize, max_n: usize) -> Result<PreparedGraph> {
    let (_, pairs) = parse_edge_pairs(text)?;
    let mut compact: HashMap<usize, usize> = HashMap::new();
    let mut source = Vec::new();
    let mut id = |x: usize| {
        *compact.entry(x).or_insert_with(|| {
            source.push(x);
            source.len() - 1
        })
    };
    let mut edges = HashSet::new();
    for (a, b) in pairs {
        let (a, b) = (id(a), id(b));
        if a != b {
            edges.insert(NodePair::new(a, b)?);
        }
    }
    let mut edges: Vec<NodePair> = edges.into_iter().collect();
    edges.sort();
    let g = Graph::from_edges(source.len(), edges.iter().map(NodePair::endpoints))?;
    let (lcc, kept) = g.largest_component();
    let n = lcc.num_nodes();
    if n < min_n || n > max_n {
        return Err(Error::SizeOutOfRange {
            got: n,
            min: min_n,
            max: max_n,
        });
    }
    Ok(PreparedGraph {
        graph: lcc,
        original_labels: kept.into_iter().map(|k| source[k]).collect(),
    })
}

pub fn load_and_prepare<P: AsRef<Path>>(
    path: P,
    min_n: usize,
    max_n: usize,
) -> Result<PreparedGraph> {
    prepare_edge_list(&std::fs::read_to_string(path)?, min_n, max_n)
}
