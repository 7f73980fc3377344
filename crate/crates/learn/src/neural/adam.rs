use super::{NetScalar, Parameters};
use crate::error::{LearnError, Result};

/// Adam moments for a parameter set `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<P> {
    pub first: P,
    pub second: P,
    pub step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl<P> AdamState<P> {
    pub const DEFAULT_LR: f64 = 1e-4;

    /// Zero moments shaped like `params`, with the given learning rate.
    pub fn new<T: NetScalar>(params: &P, lr: f64) -> Self
    where
        P: Parameters<T>,
    {
        Self {
            first: params.zeros_like(),
            second: params.zeros_like(),
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update of `params` along `grad`.
pub fn adam_step<T: NetScalar, P: Parameters<T>>(
    params: &mut P,
    grad: &P,
    st: &mut AdamState<P>,
) -> Result<()> {
    let shapes_match = params
        .tensors()
        .iter()
        .zip(grad.tensors())
        .zip(st.first.tensors())
        .all(|((p, g), m)| p.dim() == g.dim() && p.dim() == m.dim());
    if !shapes_match || params.tensors().len() != grad.tensors().len() {
        return Err(LearnError::ShapeMismatch(
            "gradient does not match parameters".into(),
        ));
    }
    for (name, g) in grad.names().iter().zip(grad.tensors()) {
        if !g.iter().all(|x| x.is_finite()) {
            return Err(LearnError::NonFiniteGradient(name));
        }
    }
    st.step += 1;
    let t = st.step as i32;
    let c = T::from_f64_lossy;
    let (b1, b2) = (c(st.beta1), c(st.beta2));
    let correction1 = T::one() - c(st.beta1.powi(t));
    let correction2 = T::one() - c(st.beta2.powi(t));
    let (lr, eps) = (c(st.lr), c(st.eps));
    let tensors = params.tensors_mut().into_iter().zip(grad.tensors()).zip(
        st.first
            .tensors_mut()
            .into_iter()
            .zip(st.second.tensors_mut()),
    );
    for ((p, g), (m, v)) in tensors {
        ndarray::Zip::from(p)
            .and(g)
            .and(m)
            .and(v)
            .for_each(|p, &g, m, v| {
                *m = b1 * *m + (T::one() - b1) * g;
                *v = b2 * *v + (T::one() - b2) * g * g;
                let m_hat = *m / correction1;
                let v_hat = *v / correction2;
                *p -= lr * m_hat / (v_hat.sqrt() + eps);
            });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{NetConfig, NetworkParams};
    use netrobust_core::rng::seeded;

    fn config() -> NetConfig {
        NetConfig {
            embed_dim: 2,
            hidden: 3,
            rounds: 1,
        }
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let before = NetworkParams::<f64>::glorot_init(config(), &mut seeded(1)).unwrap();
        let zero = before.zeros_like();
        let mut p = before.clone();
        let mut st = AdamState::new(&p, 1e-4);
        adam_step(&mut p, &zero, &mut st).unwrap();
        assert_eq!(p, before);
        assert_eq!(st.step, 1);

        st.first.theta2.fill(1.0);
        st.second.theta2.fill(1.0);
        adam_step(&mut p, &zero, &mut st).unwrap();
        assert_eq!(st.first.theta2[[0, 0]], 0.9);
        assert_eq!(st.second.theta2[[0, 0]], 0.999);
        assert_eq!(p.theta1, before.theta1);
    }

    #[test]
    fn first_step_matches_hand_calculation() {
        // m = 0.1 g, v = 0.001 g^2; corrected: m_hat = g, v_hat = g^2
        // update = -lr * g / (|g| + eps)
        let mut p = NetworkParams::<f64>::zeros(config());
        let mut g = p.zeros_like();
        g.theta3[[0, 1]] = 0.5;
        g.theta3[[0, 2]] = -2.0;
        let mut st = AdamState::new(&p, 1e-3);
        adam_step(&mut p, &g, &mut st).unwrap();
        let expected = |g: f64| -1e-3 * g / (g.abs() + 1e-8);
        assert!((p.theta3[[0, 1]] - expected(0.5)).abs() < 1e-15);
        assert!((p.theta3[[0, 2]] - expected(-2.0)).abs() < 1e-15);
        assert_eq!(p.theta3[[0, 0]], 0.0);
    }

    #[test]
    fn deterministic_and_rejects_nan() {
        let p0 = NetworkParams::<f64>::glorot_init(config(), &mut seeded(5)).unwrap();
        let g = NetworkParams::<f64>::glorot_init(config(), &mut seeded(6)).unwrap();
        let run = || {
            let mut p = p0.clone();
            let mut st = AdamState::new(&p, 1e-4);
            adam_step(&mut p, &g, &mut st).unwrap();
            adam_step(&mut p, &g, &mut st).unwrap();
            (p, st)
        };
        assert_eq!(run(), run());
        let mut bad = g.clone();
        bad.theta6[[0, 0]] = f64::NAN;
        let mut p = p0.clone();
        let mut st = AdamState::new(&p, 1e-4);
        assert!(matches!(
            adam_step(&mut p, &bad, &mut st),
            Err(LearnError::NonFiniteGradient("theta6"))
        ));
        assert_eq!(p, p0);
    }
}
