use serde::{Deserialize, Serialize};

/// Element-wise (or row-wise, for softmax) activation functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Tanh,
    Softmax,
    Linear,
}

/// One layer in a network stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LayerSpec {
    /// Affine transform plus activation. Weights are stored `output×input`.
    Dense {
        input: usize,
        output: usize,
        activation: Activation,
    },
    /// Inverted dropout: in train mode each unit is zeroed independently
    /// with probability `rate` and survivors are scaled by `1/(1-rate)`;
    /// in eval mode the layer is the identity.
    Dropout { rate: f64 },
    /// Scales each row to unit mean-square value: `y = x·sqrt(d/Σx²)`.
    PowerNorm,
    /// AWGN channel at the given SNR, assuming a unit-mean-square input
    /// (guaranteed by a preceding `PowerNorm`). Noise is resampled on every
    /// forward pass, in train and eval mode alike; the channel is physical
    /// and always present.
    GaussianNoise { snr_db: f64 },
}

impl LayerSpec {
    pub fn dense(input: usize, output: usize, activation: Activation) -> Self {
        LayerSpec::Dense { input, output, activation }
    }

    /// Trainable parameters contributed by this layer.
    pub fn param_count(&self) -> usize {
        match self {
            LayerSpec::Dense { input, output, .. } => input * output + output,
            _ => 0,
        }
    }

    /// Output width given an input width, if this layer accepts it.
    pub fn out_dim(&self, in_dim: usize) -> Option<usize> {
        match self {
            LayerSpec::Dense { input, output, .. } => {
                (*input == in_dim).then_some(*output)
            }
            _ => Some(in_dim),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            LayerSpec::Dense { input, output, .. } => *input >= 1 && *output >= 1,
            LayerSpec::Dropout { rate } => (0.0..1.0).contains(rate),
            LayerSpec::PowerNorm => true,
            LayerSpec::GaussianNoise { snr_db } => snr_db.is_finite(),
        }
    }
}
