//! Labeled undirected simple graphs.
//!
//! Nodes are labeled `0..N` and never relabeled. Removing a node clears its
//! incident edges and masks it out, so labels held elsewhere (removal
//! permutations, environment actions) stay valid.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// An unordered node pair stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodePair {
    u: usize,
    v: usize,
}

impl NodePair {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Self { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Self { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a)),
        }
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }
}

impl std::fmt::Display for NodePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// Undirected, unweighted simple graph with sorted adjacency lists.
///
/// Equality compares live-node sets and edge sets, label-sensitively.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    live: Vec<bool>,
    num_live: usize,
    num_edges: usize,
}

impl Graph {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            live: vec![true; n],
            num_live: n,
            num_edges: 0,
        }
    }

    /// Builds a graph, rejecting self-loops and repeated edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            g.add_edge(NodePair::new(a, b)?)?;
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are simple")
    }

    /// Star with center 0 and leaves `1..n`.
    pub fn star(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (0, i))).expect("star edges are simple")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edges(n, edges).expect("complete edges are simple")
    }

    /// Total node count, including removed nodes.
    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_live_nodes(&self) -> usize {
        self.num_live
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn is_live(&self, v: usize) -> bool {
        self.live.get(v).copied().unwrap_or(false)
    }

    pub fn live_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(move |&v| self.live[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.num_nodes() && self.adjacency[a].binary_search(&b).is_ok()
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.num_nodes() {
            return Err(Error::NodeOutOfRange {
                node: v,
                num_nodes: self.num_nodes(),
            });
        }
        if !self.live[v] {
            return Err(Error::NodeAlreadyRemoved(v));
        }
        Ok(())
    }

    /// Adds `e` in place.
    pub fn add_edge(&mut self, e: NodePair) -> Result<()> {
        let (u, v) = e.endpoints();
        self.check_node(u)?;
        self.check_node(v)?;
        let pos_u = match self.adjacency[u].binary_search(&v) {
            Ok(_) => return Err(Error::DuplicateEdge(u, v)),
            Err(p) => p,
        };
        self.adjacency[u].insert(pos_u, v);
        let pos_v = self.adjacency[v]
            .binary_search(&u)
            .expect_err("adjacency is symmetric");
        self.adjacency[v].insert(pos_v, u);
        self.num_edges += 1;
        Ok(())
    }

    /// Copy of `self` with `e` added.
    pub fn with_edge(&self, e: NodePair) -> Result<Graph> {
        let mut g = self.clone();
        g.add_edge(e)?;
        Ok(g)
    }

    pub fn remove_edge(&mut self, e: NodePair) -> Result<()> {
        let (u, v) = e.endpoints();
        let pos_u = self.adjacency[u]
            .binary_search(&v)
            .map_err(|_| Error::MissingEdge(u, v))?;
        self.adjacency[u].remove(pos_u);
        let pos_v = self.adjacency[v]
            .binary_search(&u)
            .expect("adjacency is symmetric");
        self.adjacency[v].remove(pos_v);
        self.num_edges -= 1;
        Ok(())
    }

    /// Removes `v` and all its edges in place. Labels of other nodes are unchanged.
    pub fn remove_node(&mut self, v: usize) -> Result<()> {
        self.check_node(v)?;
        let neighbors = std::mem::take(&mut self.adjacency[v]);
        for &u in &neighbors {
            let pos = self.adjacency[u]
                .binary_search(&v)
                .expect("adjacency is symmetric");
            self.adjacency[u].remove(pos);
        }
        self.num_edges -= neighbors.len();
        self.live[v] = false;
        self.num_live -= 1;
        Ok(())
    }

    pub fn without_node(&self, v: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.remove_node(v)?;
        Ok(g)
    }

    /// Component label per node (`usize::MAX` for removed nodes) and the component count.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.num_nodes();
        let mut label = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut count = 0;
        for start in 0..n {
            if !self.live[start] || label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adjacency[x] {
                    if label[y] == usize::MAX {
                        label[y] = count;
                        queue.push_back(y);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Number of connected components among live nodes; 0 when none are live.
    pub fn num_connected_components(&self) -> usize {
        self.component_labels().1
    }

    pub fn is_connected(&self) -> bool {
        self.num_connected_components() == 1
    }

    pub fn is_complete(&self) -> bool {
        let n = self.num_live;
        self.num_edges == n * n.saturating_sub(1) / 2
    }

    /// All edges, lexicographically sorted.
    pub fn edges(&self) -> Vec<NodePair> {
        let mut out = Vec::with_capacity(self.num_edges);
        for (u, adj) in self.adjacency.iter().enumerate() {
            for &v in adj.iter().filter(|&&v| v > u) {
                out.push(NodePair { u, v });
            }
        }
        out
    }

    /// All absent pairs between live nodes, lexicographically sorted.
    pub fn non_edges(&self) -> Vec<NodePair> {
        let n = self.num_nodes();
        let mut out = Vec::new();
        for u in 0..n {
            if !self.live[u] {
                continue;
            }
            let adj = &self.adjacency[u];
            let mut k = adj.partition_point(|&x| x <= u);
            for v in u + 1..n {
                if k < adj.len() && adj[k] == v {
                    k += 1;
                } else if self.live[v] {
                    out.push(NodePair { u, v });
                }
            }
        }
        out
    }

    pub fn num_non_edges(&self) -> usize {
        let n = self.num_live;
        n * n.saturating_sub(1) / 2 - self.num_edges
    }

    /// Graph with node `v` renamed to `perm[v]`. `perm` must be a permutation of `0..N`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::InvalidPermutation);
        }
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation);
            }
        }
        let mut g = Graph::empty(n);
        for e in self.edges() {
            g.add_edge(NodePair::new(perm[e.u], perm[e.v])?)?;
        }
        for v in (0..n).filter(|&v| !self.live[v]) {
            g.remove_node(perm[v])?;
        }
        Ok(g)
    }

    /// Largest connected component relabeled contiguously in increasing
    /// original-label order, plus the original label of each new node.
    ///
    /// Ties between equally large components go to the one holding the smallest label.
    pub fn largest_component(&self) -> (Graph, Vec<usize>) {
        let (label, count) = self.component_labels();
        let mut sizes = vec![0usize; count];
        for &l in label.iter().filter(|&&l| l != usize::MAX) {
            sizes[l] += 1;
        }
        let Some(best) = (0..count).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))) else {
            return (Graph::empty(0), Vec::new());
        };
        let original: Vec<usize> = (0..self.num_nodes())
            .filter(|&v| label[v] == best)
            .collect();
        let mut index = vec![usize::MAX; self.num_nodes()];
        for (new, &old) in original.iter().enumerate() {
            index[old] = new;
        }
        let mut g = Graph::empty(original.len());
        for e in self.edges() {
            if label[e.u] == best {
                g.add_edge(NodePair {
                    u: index[e.u],
                    v: index[e.v],
                })
                .expect("subgraph of a simple graph is simple");
            }
        }
        (g, original)
    }

    /// Serializes as an edge list. A leading `# nodes: N` comment keeps isolated
    /// high-labeled nodes across a round trip.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nodes: {}", self.num_nodes());
        for e in self.edges() {
            let _ = writeln!(out, "{} {}", e.u, e.v);
        }
        out
    }

    /// Parses an edge list. Repeated edges (in either orientation) are merged,
    /// self-loops are dropped.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let (declared, pairs) = parse_edge_pairs(text)?;
        let max_label = pairs.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        let n = declared.unwrap_or(0).max(max_label);
        let mut g = Graph::empty(n);
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            let e = NodePair::new(a, b)?;
            if !g.has_edge(a, b) {
                g.add_edge(e)?;
            }
        }
        Ok(g)
    }

    pub fn read_edge_list<P: AsRef<Path>>(path: P) -> Result<Graph> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_edge_list(&text)
    }

    pub fn write_edge_list<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

/// Raw edge-list parse: optional declared node count plus label pairs in file order.
pub fn parse_edge_pairs(text: &str) -> Result<(Option<usize>, Vec<(usize, usize)>)> {
    let mut declared = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix("nodes:") {
                if let Ok(n) = n.trim().parse::<usize>() {
                    declared = Some(n);
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected two node labels, found {} fields", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("invalid node label {s:?}"),
            })
        };
        pairs.push((parse(fields[0])?, parse(fields[1])?));
    }
    Ok((declared, pairs))
}
