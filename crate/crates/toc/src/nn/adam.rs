use super::{DenseParams, Gradients};
use crate::{Error, Result};

/// Adam optimizer state: moment accumulators mirror the parameter shapes.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    m: Vec<DenseParams>,
    v: Vec<DenseParams>,
}

impl AdamState {
    pub fn new(params: &[DenseParams], lr: f64) -> Self {
        let zeros: Vec<DenseParams> =
            params.iter().map(|p| DenseParams::zeros(p.input, p.output)).collect();
        AdamState {
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            m: zeros.clone(),
            v: zeros,
        }
    }
}

/// One bias-corrected Adam update over all dense-layer parameters.
///
/// `frozen_prefix` dense blocks are left untouched (used when a pre-trained
/// front end is frozen while a later stage trains).
pub fn adam_step(
    state: &mut AdamState,
    params: &mut [DenseParams],
    grads: &Gradients,
    frozen_prefix: usize,
) -> Result<()> {
    if params.len() != grads.dense.len() || params.len() != state.m.len() {
        return Err(Error::Shape(format!(
            "adam over {} blocks, grads have {}, state has {}",
            params.len(),
            grads.dense.len(),
            state.m.len()
        )));
    }
    if !grads.is_finite() {
        return Err(Error::Numeric("non-finite gradient in adam step".into()));
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    for idx in frozen_prefix..params.len() {
        let p = &mut params[idx];
        let g = &grads.dense[idx];
        let m = &mut state.m[idx];
        let v = &mut state.v[idx];
        update(&mut p.weights, &g.weights, &mut m.weights, &mut v.weights, state.lr, state.beta1, state.beta2, state.epsilon, bc1, bc2);
        update(&mut p.bias, &g.bias, &mut m.bias, &mut v.bias, state.lr, state.beta1, state.beta2, state.epsilon, bc1, bc2);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn update(
    p: &mut [f64],
    g: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    bc1: f64,
    bc2: f64,
) {
    for i in 0..p.len() {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        p[i] -= lr * m_hat / (v_hat.sqrt() + epsilon);
    }
}
