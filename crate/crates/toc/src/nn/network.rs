use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use super::{Activation, LayerSpec, Matrix};
use crate::rng::{stream_rng, Rng};
use crate::{Error, Result};

/// Forward-pass mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Weights (`out×in`) and bias (`out`) of one dense layer. Also reused as
/// the container for the matching gradients and Adam moment accumulators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseParams {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub input: usize,
    pub output: usize,
}

impl DenseParams {
    pub fn zeros(input: usize, output: usize) -> Self {
        DenseParams { weights: vec![0.0; input * output], bias: vec![0.0; output], input, output }
    }

    pub fn weight_row(&self, out_idx: usize) -> &[f64] {
        &self.weights[out_idx * self.input..(out_idx + 1) * self.input]
    }

    fn weight_matrix(&self) -> Matrix {
        Matrix::from_vec(self.output, self.input, self.weights.clone()).expect("consistent")
    }
}

/// Per-dense-layer parameter gradients, shapes mirroring [`Network::params`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub dense: Vec<DenseParams>,
}

impl Gradients {
    pub fn is_finite(&self) -> bool {
        self.dense.iter().all(|d| {
            d.weights.iter().all(|v| v.is_finite()) && d.bias.iter().all(|v| v.is_finite())
        })
    }
}

/// Independent RNG streams for the two stochastic layer kinds, so enabling
/// dropout never shifts the channel-noise sequence and vice versa.
pub struct ForwardRngs {
    pub dropout: Rng,
    pub channel: Rng,
}

impl ForwardRngs {
    pub fn from_seed(seed: u64) -> Self {
        ForwardRngs {
            dropout: stream_rng(seed, crate::rng::stream::DROPOUT),
            channel: stream_rng(seed, crate::rng::stream::CHANNEL),
        }
    }
}

/// Everything `backward` needs from a matching `forward` call: the full
/// activation chain plus the dropout masks that were drawn.
pub struct ForwardCache {
    /// `acts[i]` is the input to layer `i`; `acts[len]` is the final output.
    acts: Vec<Matrix>,
    /// One entry per layer; `Some(mask)` only for train-mode dropout.
    masks: Vec<Option<Matrix>>,
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        self.acts.last().expect("non-empty cache")
    }
}

/// A fixed stack of layers with owned dense parameters.
#[derive(Debug, Clone)]
pub struct Network {
    specs: Vec<LayerSpec>,
    params: Vec<DenseParams>,
    /// Seed recorded for training provenance (stored in weight files).
    seed: u64,
}

impl Network {
    /// Builds a network with zeroed parameters, validating layer specs and
    /// adjacent-layer dimension compatibility.
    pub fn new(specs: Vec<LayerSpec>) -> Result<Self> {
        let mut params = Vec::new();
        let mut dim: Option<usize> = None;
        for (i, spec) in specs.iter().enumerate() {
            if !spec.is_valid() {
                return Err(Error::Config(format!("invalid layer {i}: {spec:?}")));
            }
            if let LayerSpec::Dense { input, output, .. } = spec {
                if let Some(d) = dim {
                    if d != *input {
                        return Err(Error::Shape(format!(
                            "layer {i} expects input {input} but receives {d}"
                        )));
                    }
                }
                params.push(DenseParams::zeros(*input, *output));
                dim = Some(*output);
            }
        }
        Ok(Network { specs, params, seed: 0 })
    }

    /// Reassembles a network from specs and matching dense parameters.
    pub fn from_parts(specs: Vec<LayerSpec>, params: Vec<DenseParams>, seed: u64) -> Result<Self> {
        let mut net = Network::new(specs)?;
        if net.params.len() != params.len() {
            return Err(Error::Shape(format!(
                "expected {} dense parameter blocks, got {}",
                net.params.len(),
                params.len()
            )));
        }
        for (expect, got) in net.params.iter().zip(&params) {
            if expect.input != got.input || expect.output != got.output {
                return Err(Error::Shape(format!(
                    "parameter block is {}x{}, spec wants {}x{}",
                    got.output, got.input, expect.output, expect.input
                )));
            }
        }
        net.params = params;
        net.seed = seed;
        Ok(net)
    }

    pub fn into_parts(self) -> (Vec<LayerSpec>, Vec<DenseParams>, u64) {
        (self.specs, self.params, self.seed)
    }

    pub fn specs(&self) -> &[LayerSpec] {
        &self.specs
    }

    pub fn params(&self) -> &[DenseParams] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [DenseParams] {
        &mut self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    /// Input width, taken from the first dense layer.
    pub fn input_dim(&self) -> Option<usize> {
        self.specs.iter().find_map(|s| match s {
            LayerSpec::Dense { input, .. } => Some(*input),
            _ => None,
        })
    }

    /// Output width for a given input width.
    pub fn output_dim(&self) -> Option<usize> {
        self.specs.iter().rev().find_map(|s| match s {
            LayerSpec::Dense { output, .. } => Some(*output),
            _ => None,
        })
    }

    /// Total trainable parameters: Σ (in×out + out) over dense layers.
    pub fn param_count(&self) -> usize {
        self.specs.iter().map(LayerSpec::param_count).sum()
    }

    /// Fan-based uniform init in `±sqrt(6/(in+out))` per dense layer.
    pub fn init_weights(&mut self, rng: &mut Rng) {
        for p in &mut self.params {
            let limit = (6.0 / (p.input + p.output) as f64).sqrt();
            let dist = Uniform::new_inclusive(-limit, limit).expect("valid range");
            for w in &mut p.weights {
                *w = dist.sample(rng);
            }
            for b in &mut p.bias {
                *b = 0.0;
            }
        }
    }

    /// Runs the stack over a batch (`rows` samples of width `cols`).
    ///
    /// In eval mode dropout is the identity; Gaussian-noise channel layers
    /// add noise in both modes.
    pub fn forward(
        &self,
        batch: &Matrix,
        mode: Mode,
        rngs: &mut ForwardRngs,
    ) -> Result<(Matrix, ForwardCache)> {
        if let Some(d) = self.input_dim() {
            if batch.cols() != d {
                return Err(Error::Shape(format!(
                    "batch width {} != network input {}",
                    batch.cols(),
                    d
                )));
            }
        }
        let mut acts = Vec::with_capacity(self.specs.len() + 1);
        let mut masks = Vec::with_capacity(self.specs.len());
        acts.push(batch.clone());
        let mut dense_idx = 0;
        for (i, spec) in self.specs.iter().enumerate() {
            let x = acts.last().expect("non-empty");
            let (y, mask) = match spec {
                LayerSpec::Dense { activation, .. } => {
                    let p = &self.params[dense_idx];
                    dense_idx += 1;
                    let mut z = x.matmul_nt(&p.weight_matrix())?;
                    for r in 0..z.rows() {
                        for (v, b) in z.row_mut(r).iter_mut().zip(&p.bias) {
                            *v += b;
                        }
                    }
                    apply_activation(&mut z, *activation);
                    (z, None)
                }
                LayerSpec::Dropout { rate } => match mode {
                    Mode::Eval => (x.clone(), None),
                    Mode::Train => {
                        let scale = 1.0 / (1.0 - rate);
                        let mut mask = Matrix::zeros(x.rows(), x.cols());
                        for v in mask.data_mut() {
                            *v = if rngs.dropout.random::<f64>() < *rate { 0.0 } else { scale };
                        }
                        let mut y = x.clone();
                        for (v, m) in y.data_mut().iter_mut().zip(mask.data()) {
                            *v *= m;
                        }
                        (y, Some(mask))
                    }
                },
                LayerSpec::PowerNorm => {
                    let mut y = x.clone();
                    let d = y.cols() as f64;
                    for r in 0..y.rows() {
                        let row = y.row_mut(r);
                        let ss: f64 = row.iter().map(|v| v * v).sum();
                        if ss == 0.0 {
                            return Err(Error::Numeric(format!(
                                "power norm over a zero row at layer {i}"
                            )));
                        }
                        let alpha = (d / ss).sqrt();
                        for v in row {
                            *v *= alpha;
                        }
                    }
                    (y, None)
                }
                LayerSpec::GaussianNoise { snr_db } => {
                    let sigma = 10f64.powf(-snr_db / 20.0);
                    let mut y = x.clone();
                    for v in y.data_mut() {
                        let n: f64 = StandardNormal.sample(&mut rngs.channel);
                        *v += sigma * n;
                    }
                    (y, None)
                }
            };
            if !y.is_finite() {
                return Err(Error::NonFinite { layer: i, context: format!("{spec:?}") });
            }
            acts.push(y);
            masks.push(mask);
        }
        let output = acts.last().expect("non-empty").clone();
        Ok((output, ForwardCache { acts, masks }))
    }

    /// Reverse-mode pass: gradients of a scalar loss w.r.t. every dense
    /// parameter and w.r.t. the network input, given `d(loss)/d(output)`.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        output_grad: &Matrix,
    ) -> Result<(Gradients, Matrix)> {
        if cache.acts.len() != self.specs.len() + 1 || cache.masks.len() != self.specs.len() {
            return Err(Error::State(format!(
                "cache has {} activations for a {}-layer network",
                cache.acts.len(),
                self.specs.len()
            )));
        }
        let out = cache.output();
        if output_grad.rows() != out.rows() || output_grad.cols() != out.cols() {
            return Err(Error::Shape(format!(
                "output grad {}x{} vs output {}x{}",
                output_grad.rows(),
                output_grad.cols(),
                out.rows(),
                out.cols()
            )));
        }
        let mut dense_grads: Vec<DenseParams> =
            self.params.iter().map(|p| DenseParams::zeros(p.input, p.output)).collect();
        let mut g = output_grad.clone();
        let mut dense_idx = self.params.len();
        for (i, spec) in self.specs.iter().enumerate().rev() {
            let x = &cache.acts[i];
            let y = &cache.acts[i + 1];
            g = match spec {
                LayerSpec::Dense { activation, .. } => {
                    dense_idx -= 1;
                    let p = &self.params[dense_idx];
                    let dz = activation_backward(&g, y, *activation);
                    let dw = dz.matmul_tn(x)?;
                    dense_grads[dense_idx].weights = dw.data().to_vec();
                    dense_grads[dense_idx].bias = dz.col_sums();
                    dz.matmul_nn(&p.weight_matrix())?
                }
                LayerSpec::Dropout { .. } => match &cache.masks[i] {
                    // Eval-mode dropout was the identity.
                    None => g,
                    Some(mask) => {
                        let mut dx = g;
                        for (v, m) in dx.data_mut().iter_mut().zip(mask.data()) {
                            *v *= m;
                        }
                        dx
                    }
                },
                LayerSpec::PowerNorm => {
                    // y = αx with α = sqrt(d/Σx²); dy_j/dx_i = αδ_ij − αx_ix_j/Σx²
                    let d = x.cols() as f64;
                    let mut dx = g.clone();
                    for r in 0..x.rows() {
                        let xr = x.row(r);
                        let gr = g.row(r);
                        let ss: f64 = xr.iter().map(|v| v * v).sum();
                        let alpha = (d / ss).sqrt();
                        let gx: f64 = gr.iter().zip(xr).map(|(a, b)| a * b).sum();
                        for ((o, &gi), &xi) in dx.row_mut(r).iter_mut().zip(gr).zip(xr) {
                            *o = alpha * gi - alpha * gx * xi / ss;
                        }
                    }
                    dx
                }
                // Additive noise is constant w.r.t. the input.
                LayerSpec::GaussianNoise { .. } => g,
            };
        }
        Ok((Gradients { dense: dense_grads }, g))
    }
}

fn apply_activation(z: &mut Matrix, activation: Activation) {
    match activation {
        Activation::Linear => {}
        Activation::Relu => {
            for v in z.data_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        Activation::Tanh => {
            for v in z.data_mut() {
                *v = v.tanh();
            }
        }
        Activation::Softmax => {
            for r in 0..z.rows() {
                let row = z.row_mut(r);
                let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                for v in row.iter_mut() {
                    *v = (*v - max).exp();
                    sum += *v;
                }
                for v in row {
                    *v /= sum;
                }
            }
        }
    }
}

/// `d(loss)/d(pre-activation)` from `d(loss)/d(post-activation)`, using only
/// the post-activation values.
fn activation_backward(g: &Matrix, y: &Matrix, activation: Activation) -> Matrix {
    match activation {
        Activation::Linear => g.clone(),
        Activation::Relu => {
            let mut dz = g.clone();
            for (v, &yi) in dz.data_mut().iter_mut().zip(y.data()) {
                if yi <= 0.0 {
                    *v = 0.0;
                }
            }
            dz
        }
        Activation::Tanh => {
            let mut dz = g.clone();
            for (v, &yi) in dz.data_mut().iter_mut().zip(y.data()) {
                *v *= 1.0 - yi * yi;
            }
            dz
        }
        Activation::Softmax => {
            // dz_i = y_i (g_i − Σ_j g_j y_j), rowwise
            let mut dz = g.clone();
            for r in 0..y.rows() {
                let yr = y.row(r);
                let gr = g.row(r);
                let gy: f64 = gr.iter().zip(yr).map(|(a, b)| a * b).sum();
                for ((o, &gi), &yi) in dz.row_mut(r).iter_mut().zip(gr).zip(yr) {
                    *o = yi * (gi - gy);
                }
            }
            dz
        }
    }
}
