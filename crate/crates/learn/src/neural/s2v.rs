use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use netrobust_core::env::EnvState;
use netrobust_core::Graph;

use super::NetScalar;
use crate::error::{LearnError, Result};

/// One-hot stub indicator per node: `[0, 1]` for the stub, `[1, 0]` otherwise.
pub fn node_features<T: NetScalar>(state: &EnvState) -> Array2<T> {
    features(state.graph().num_nodes(), state.stub())
}

pub(crate) fn features<T: NetScalar>(n: usize, stub: Option<usize>) -> Array2<T> {
    let mut x = Array2::zeros((n, 2));
    for v in 0..n {
        let col = usize::from(Some(v) == stub);
        x[[v, col]] = T::one();
    }
    x
}

/// Node embeddings (one row per node, zero rows for removed nodes) and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding<T> {
    pub nodes: Array2<T>,
    pub graph: Array1<T>,
}

/// Intermediates kept for the backward pass.
pub(crate) struct EncoderTrace<T> {
    /// Neighbor sums `A mu^(k-1)` for k = 1..=K.
    aggregates: Vec<Array2<T>>,
    /// Pre-activations for k = 1..=K.
    pre: Vec<Array2<T>>,
}

fn neighbor_sum<T: NetScalar>(g: &Graph, mu: &Array2<T>) -> Array2<T> {
    let mut out = Array2::zeros(mu.raw_dim());
    for v in g.live_nodes() {
        let mut row = out.row_mut(v);
        for &u in g.neighbors(v) {
            row += &mu.row(u);
        }
    }
    out
}

fn check_inputs<T>(g: &Graph, x: &Array2<T>, theta1: &Array2<T>, theta2: &Array2<T>) -> Result<()> {
    let d = theta1.nrows();
    if x.dim() != (g.num_nodes(), 2) || theta1.ncols() != 2 || theta2.dim() != (d, d) {
        return Err(LearnError::ShapeMismatch(format!(
            "features {:?}, theta1 {:?}, theta2 {:?} on {} nodes",
            x.dim(),
            theta1.dim(),
            theta2.dim(),
            g.num_nodes()
        )));
    }
    Ok(())
}

pub(crate) fn encode<T: NetScalar>(
    g: &Graph,
    x: &Array2<T>,
    theta1: &Array2<T>,
    theta2: &Array2<T>,
    rounds: usize,
) -> Result<(Embedding<T>, EncoderTrace<T>)> {
    check_inputs(g, x, theta1, theta2)?;
    let n = g.num_nodes();
    let d = theta1.nrows();
    let dead: Vec<usize> = (0..n).filter(|&v| !g.is_live(v)).collect();
    let input = x.dot(&theta1.t());
    let mut mu = Array2::<T>::zeros((n, d));
    let mut trace = EncoderTrace {
        aggregates: Vec::with_capacity(rounds),
        pre: Vec::with_capacity(rounds),
    };
    for _ in 0..rounds {
        let agg = neighbor_sum(g, &mu);
        let mut pre = &input + &agg.dot(&theta2.t());
        for &v in &dead {
            pre.row_mut(v).fill(T::zero());
        }
        mu = pre.mapv(relu);
        trace.aggregates.push(agg);
        trace.pre.push(pre);
    }
    let graph = mu.sum_axis(Axis(0));
    Ok((Embedding { nodes: mu, graph }, trace))
}

/// `rounds` synchronous message-passing rounds from zero, then sum pooling.
pub fn embed<T: NetScalar>(
    g: &Graph,
    x: &Array2<T>,
    theta1: &Array2<T>,
    theta2: &Array2<T>,
    rounds: usize,
) -> Result<Embedding<T>> {
    encode(g, x, theta1, theta2, rounds).map(|(e, _)| e)
}

pub(crate) fn relu<T: NetScalar>(z: T) -> T {
    if z > T::zero() {
        z
    } else {
        T::zero()
    }
}

pub(crate) fn relu_mask<T: NetScalar>(z: T) -> T {
    if z > T::zero() {
        T::one()
    } else {
        T::zero()
    }
}

/// Gradients of the encoder weights given upstream gradients on the node
/// embeddings and on the pooled graph embedding.
pub(crate) fn encoder_backward<T: NetScalar>(
    g: &Graph,
    x: &Array2<T>,
    theta2: &Array2<T>,
    trace: &EncoderTrace<T>,
    mut d_nodes: Array2<T>,
    d_graph: &Array1<T>,
) -> (Array2<T>, Array2<T>) {
    let d = theta2.nrows();
    let mut d_theta1 = Array2::zeros((d, 2));
    let mut d_theta2 = Array2::zeros((d, d));
    for v in g.live_nodes() {
        let mut row = d_nodes.row_mut(v);
        row += d_graph;
    }
    for k in (0..trace.pre.len()).rev() {
        let mut d_pre = d_nodes;
        d_pre.zip_mut_with(&trace.pre[k], |dz, &z| *dz *= relu_mask(z));
        d_theta1 += &d_pre.t().dot(x);
        d_theta2 += &d_pre.t().dot(&trace.aggregates[k]);
        if k == 0 {
            break;
        }
        d_nodes = neighbor_sum(g, &d_pre.dot(theta2));
    }
    (d_theta1, d_theta2)
}

/// Splits a head input weight `h x (m d)` into its `m` column blocks.
pub(crate) fn blocks<T>(w: &Array2<T>, d: usize) -> Vec<ArrayView2<'_, T>> {
    (0..w.ncols() / d)
        .map(|i| w.slice(s![.., i * d..(i + 1) * d]))
        .collect()
}
