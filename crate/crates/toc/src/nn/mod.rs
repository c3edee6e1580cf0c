//! Dense feedforward network engine with reverse-mode gradients.
//!
//! Networks are fixed layer stacks (dense, dropout, power normalization,
//! Gaussian-noise channel). Gradients are available both for parameters
//! (training) and for the input (gradient-sign evasion attacks). Channel
//! layers sit inside the graph so joint training across a noisy channel
//! works out of the box.

mod adam;
mod layer;
mod loss;
mod matrix;
mod network;
mod weights_io;

pub use adam::{adam_step, AdamState};
pub use layer::{Activation, LayerSpec};
pub use loss::{loss, LossKind};
pub use matrix::Matrix;
pub use network::{
    DenseParams, ForwardCache, ForwardRngs, Gradients, Mode, Network,
};
pub use weights_io::{load_weights, save_weights};
