use ndarray::{Array1, Array2, Axis};
use netrobust_core::env::EnvState;
use rayon::prelude::*;

use super::s2v::{blocks, encode, encoder_backward, features, relu, relu_mask, Embedding};
use super::{NetScalar, NetworkParams, Parameters};
use crate::error::{LearnError, Result};

/// Batch items processed per parallel task; fixed so the reduction order is too.
const GRAD_CHUNK: usize = 8;

impl<T: NetScalar> NetworkParams<T> {
    /// Encoder output for a state.
    pub fn embed_state(&self, state: &EnvState) -> Result<Embedding<T>> {
        let x = features(state.graph().num_nodes(), state.stub());
        super::embed(
            state.graph(),
            &x,
            &self.theta1,
            &self.theta2,
            self.config.rounds,
        )
    }

    /// Hidden pre-activations of the active head for every node, `n x h`.
    fn head_pre(&self, emb: &Embedding<T>, stub: Option<usize>) -> Array2<T> {
        let d = self.config.embed_dim;
        match stub {
            None => {
                let w = blocks(&self.theta4, d);
                let shared = w[1].dot(&emb.graph);
                emb.nodes.dot(&w[0].t()) + &shared
            }
            Some(sigma) => {
                let w = blocks(&self.theta6, d);
                let shared = w[0].dot(&emb.nodes.row(sigma)) + w[2].dot(&emb.graph);
                emb.nodes.dot(&w[1].t()) + &shared
            }
        }
    }

    fn head_out(&self, stub: Option<usize>) -> &Array2<T> {
        if stub.is_none() {
            &self.theta3
        } else {
            &self.theta5
        }
    }

    /// Q-value of every node as the next action, ignoring validity.
    pub fn q_all(&self, emb: &Embedding<T>, stub: Option<usize>) -> Array1<T> {
        let hidden = self.head_pre(emb, stub).mapv(relu);
        hidden.dot(&self.head_out(stub).row(0))
    }
}

/// Q-values for `actions` given a precomputed embedding.
pub fn q_values_for<T: NetScalar>(
    emb: &Embedding<T>,
    stub: Option<usize>,
    actions: &[usize],
    p: &NetworkParams<T>,
) -> Result<Vec<T>> {
    let n = emb.nodes.nrows();
    if let Some(&bad) = actions.iter().find(|&&a| a >= n) {
        return Err(LearnError::InvalidAction(bad));
    }
    let all = p.q_all(emb, stub);
    Ok(actions.iter().map(|&a| all[a]).collect())
}

/// Q-values of `actions` in `state`; every action must be valid there.
pub fn q_values<T: NetScalar>(
    state: &EnvState,
    actions: &[usize],
    p: &NetworkParams<T>,
) -> Result<Vec<T>> {
    let valid = state.valid_actions()?;
    if let Some(&bad) = actions.iter().find(|a| valid.binary_search(a).is_err()) {
        return Err(LearnError::InvalidAction(bad));
    }
    q_values_for(&p.embed_state(state)?, state.stub(), actions, p)
}

/// One regression item: the network's Q(state, action) is pulled toward `target`.
#[derive(Debug, Clone, Copy)]
pub struct TdSample<'a, T> {
    pub state: &'a EnvState,
    pub action: usize,
    pub target: T,
}

#[derive(Debug, Clone)]
pub struct LossAndGrad<T, P> {
    pub loss: T,
    pub grad: P,
}

/// Squared error and gradient contribution of one item, before batch averaging.
fn item_grad<T: NetScalar>(
    p: &NetworkParams<T>,
    item: &TdSample<'_, T>,
    scale: T,
) -> Result<(T, NetworkParams<T>)> {
    let g = item.state.graph();
    let n = g.num_nodes();
    if item.action >= n || !g.is_live(item.action) {
        return Err(LearnError::InvalidAction(item.action));
    }
    let d = p.config.embed_dim;
    let stub = item.state.stub();
    let x = features(n, stub);
    let (emb, trace) = encode(g, &x, &p.theta1, &p.theta2, p.config.rounds)?;
    let a = item.action;

    let pre = p.head_pre(&emb, stub).row(a).to_owned();
    let hidden = pre.mapv(relu);
    let out = p.head_out(stub);
    let q = hidden.dot(&out.row(0));
    let residual = q - item.target;
    let dq = scale * (residual + residual);

    let mut grad = p.zeros_like();
    let mut d_pre = out.row(0).to_owned() * dq;
    d_pre.zip_mut_with(&pre, |dz, &z| *dz *= relu_mask(z));
    let mut d_nodes = Array2::zeros(emb.nodes.raw_dim());
    let d_graph;
    let outer = |col: &Array1<T>| -> Array2<T> {
        d_pre
            .view()
            .insert_axis(Axis(1))
            .dot(&col.view().insert_axis(Axis(0)))
    };
    match stub {
        None => {
            grad.theta3.row_mut(0).assign(&(&hidden * dq));
            let w = blocks(&p.theta4, d);
            let mu_a = emb.nodes.row(a).to_owned();
            let mut d4 = grad.theta4.view_mut();
            let cols = [outer(&mu_a), outer(&emb.graph)];
            for (i, c) in cols.iter().enumerate() {
                d4.slice_mut(ndarray::s![.., i * d..(i + 1) * d]).assign(c);
            }
            let mut row = d_nodes.row_mut(a);
            row += &w[0].t().dot(&d_pre);
            d_graph = w[1].t().dot(&d_pre);
        }
        Some(sigma) => {
            grad.theta5.row_mut(0).assign(&(&hidden * dq));
            let w = blocks(&p.theta6, d);
            let mu_s = emb.nodes.row(sigma).to_owned();
            let mu_a = emb.nodes.row(a).to_owned();
            let mut d6 = grad.theta6.view_mut();
            let cols = [outer(&mu_s), outer(&mu_a), outer(&emb.graph)];
            for (i, c) in cols.iter().enumerate() {
                d6.slice_mut(ndarray::s![.., i * d..(i + 1) * d]).assign(c);
            }
            {
                let mut row = d_nodes.row_mut(sigma);
                row += &w[0].t().dot(&d_pre);
            }
            let mut row = d_nodes.row_mut(a);
            row += &w[1].t().dot(&d_pre);
            d_graph = w[2].t().dot(&d_pre);
        }
    }
    let (d1, d2) = encoder_backward(g, &x, &p.theta2, &trace, d_nodes, &d_graph);
    grad.theta1 = d1;
    grad.theta2 = d2;
    Ok((residual * residual, grad))
}

/// Mean squared TD error over `batch` and its exact gradient.
pub fn grad_td_loss<T: NetScalar>(
    batch: &[TdSample<'_, T>],
    p: &NetworkParams<T>,
) -> Result<LossAndGrad<T, NetworkParams<T>>> {
    if batch.is_empty() {
        return Err(LearnError::EmptyBatch);
    }
    p.validate()?;
    let scale = T::one() / T::from_usize_lossy(batch.len());
    let partials: Vec<(T, NetworkParams<T>)> = batch
        .par_chunks(GRAD_CHUNK)
        .map(|chunk| {
            let mut acc = (T::zero(), p.zeros_like());
            for item in chunk {
                let (sq, g) = item_grad(p, item, scale)?;
                acc.0 += sq;
                acc.1.accumulate(&g);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = T::zero();
    let mut grad = p.zeros_like();
    for (sq, g) in &partials {
        total += *sq;
        grad.accumulate(g);
    }
    Ok(LossAndGrad {
        loss: total * scale,
        grad,
    })
}
