use ndarray::{Array1, Array2, Axis};
use netrobust_core::Graph;
use rayon::prelude::*;

use super::qnet::LossAndGrad;
use super::s2v::{encode, encoder_backward, features, relu, relu_mask};
use super::{NetScalar, Parameters, RegressorParams};
use crate::error::{LearnError, Result};

const GRAD_CHUNK: usize = 8;

impl<T: NetScalar> RegressorParams<T> {
    /// Predicted robustness of `g`.
    pub fn predict(&self, g: &Graph) -> Result<T> {
        let x = features(g.num_nodes(), None);
        let (emb, _) = encode(g, &x, &self.theta1, &self.theta2, self.config.rounds)?;
        let hidden = self.w_hidden.dot(&emb.graph).mapv(relu);
        Ok(hidden.dot(&self.w_out.row(0)))
    }

    fn item_grad(&self, g: &Graph, label: T, scale: T) -> Result<(T, Self)> {
        let x = features(g.num_nodes(), None);
        let (emb, trace) = encode(g, &x, &self.theta1, &self.theta2, self.config.rounds)?;
        let pre = self.w_hidden.dot(&emb.graph);
        let hidden = pre.mapv(relu);
        let residual = hidden.dot(&self.w_out.row(0)) - label;
        let dy = scale * (residual + residual);
        let mut grad = self.zeros_like();
        grad.w_out.row_mut(0).assign(&(&hidden * dy));
        let mut d_pre = self.w_out.row(0).to_owned() * dy;
        d_pre.zip_mut_with(&pre, |dz, &z| *dz *= relu_mask(z));
        grad.w_hidden = outer(&d_pre, &emb.graph);
        let d_graph = self.w_hidden.t().dot(&d_pre);
        let (d1, d2) = encoder_backward(
            g,
            &x,
            &self.theta2,
            &trace,
            Array2::zeros(emb.nodes.raw_dim()),
            &d_graph,
        );
        grad.theta1 = d1;
        grad.theta2 = d2;
        Ok((residual * residual, grad))
    }
}

fn outer<T: NetScalar>(a: &Array1<T>, b: &Array1<T>) -> Array2<T> {
    a.view()
        .insert_axis(Axis(1))
        .dot(&b.view().insert_axis(Axis(0)))
}

/// Mean squared error of predictions against labels, with its gradient.
pub fn grad_mse<T: NetScalar>(
    batch: &[(&Graph, T)],
    p: &RegressorParams<T>,
) -> Result<LossAndGrad<T, RegressorParams<T>>> {
    if batch.is_empty() {
        return Err(LearnError::EmptyBatch);
    }
    p.validate()?;
    let scale = T::one() / T::from_usize_lossy(batch.len());
    let partials: Vec<(T, RegressorParams<T>)> = batch
        .par_chunks(GRAD_CHUNK)
        .map(|chunk| {
            let mut acc = (T::zero(), p.zeros_like());
            for (g, label) in chunk {
                let (sq, grad) = p.item_grad(g, *label, scale)?;
                acc.0 += sq;
                acc.1.accumulate(&grad);
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

/// Mean squared error without gradients.
pub fn mse<T: NetScalar>(batch: &[(&Graph, T)], p: &RegressorParams<T>) -> Result<T> {
    if batch.is_empty() {
        return Err(LearnError::EmptyBatch);
    }
    let mut total = T::zero();
    for (g, label) in batch {
        let r = p.predict(g)? - *label;
        total += r * r;
    }
    Ok(total / T::from_usize_lossy(batch.len()))
}
