//! The four system configurations and their training recipes.
//!
//! - `NoChannel`: the classifier alone on the sensing data (upper bound).
//! - `Approach1`: classify at the edge, then transfer the label (the one-bit
//!   label link is assumed error-free, so inference equals `NoChannel`).
//! - `Approach2`: autoencoder communications (encoder/decoder regression
//!   trained with MSE across the channel) followed by a separately trained
//!   classifier on the reconstructed signals.
//! - `Toc`: task-oriented communications; encoder and decoder-classifier
//!   jointly trained end-to-end with cross-entropy through the channel,
//!   transmitting a single I/Q pair.

mod build;
mod manifest;
mod train;

pub use build::build;
pub use manifest::{load_pipeline, save_pipeline, Manifest};
pub use train::{init_pipeline, train};

use serde::{Deserialize, Serialize};

use crate::nn::{ForwardRngs, LayerSpec, Matrix, Mode, Network};
use crate::rng::{derive_seed, stream};
use crate::signal::Sample;
use crate::{Error, Result};

/// Which system configuration a pipeline implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    NoChannel,
    Approach1,
    Approach2,
    Toc,
}

impl PipelineKind {
    pub const ALL: [PipelineKind; 4] =
        [PipelineKind::NoChannel, PipelineKind::Approach1, PipelineKind::Approach2, PipelineKind::Toc];

    pub fn as_str(self) -> &'static str {
        match self {
            PipelineKind::NoChannel => "no_channel",
            PipelineKind::Approach1 => "approach1",
            PipelineKind::Approach2 => "approach2",
            PipelineKind::Toc => "toc",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Stable id used for seed derivation.
    pub(crate) fn id(self) -> u64 {
        match self {
            PipelineKind::NoChannel => 0,
            PipelineKind::Approach1 => 1,
            PipelineKind::Approach2 => 2,
            PipelineKind::Toc => 3,
        }
    }

    /// Whether inference runs signals through the communication channel.
    pub fn has_channel(self) -> bool {
        matches!(self, PipelineKind::Approach2 | PipelineKind::Toc)
    }
}

/// Training hyperparameters. The per-run master seed drives weight init,
/// dropout, channel noise, and batch shuffling via independent streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    pub snr_c_db: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 100, batch_size: 64, lr: 1e-3, seed: 0, snr_c_db: 10.0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 || self.batch_size < 1 {
            return Err(Error::Config("epochs and batch_size must be >= 1".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::Config("lr must be positive".into()));
        }
        Ok(())
    }
}

/// A trained (or freshly initialized) pipeline.
#[derive(Debug, Clone)]
pub struct TrainedPipeline {
    pub kind: PipelineKind,
    /// `NoChannel`/`Approach1`: `[classifier]`; `Approach2`:
    /// `[encoder, decoder, classifier]`; `Toc`: `[encoder, decoder]`.
    pub nets: Vec<Network>,
    pub snr_c_db: f64,
    /// Per-epoch mean training loss (training stages concatenated).
    pub history: Vec<f64>,
}

/// Classification outcome over a test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// `confusion[true_label][predicted_label]`.
    pub confusion: [[usize; 2]; 2],
    pub n: usize,
}

impl TrainedPipeline {
    /// The full inference stack, channel layer included where the pipeline
    /// has one.
    pub fn inference_chain(&self) -> Result<Network> {
        match self.kind {
            PipelineKind::NoChannel | PipelineKind::Approach1 => Ok(self.nets[0].clone()),
            PipelineKind::Approach2 => chain(
                &[&self.nets[0], &self.nets[1], &self.nets[2]],
                Some(self.snr_c_db),
            ),
            PipelineKind::Toc => {
                chain(&[&self.nets[0], &self.nets[1]], Some(self.snr_c_db))
            }
        }
    }

    /// The transmitted channel symbols for one sample: the power-normalized
    /// encoder output before noise (2 reals for `Toc`, 128 for `Approach2`).
    pub fn encode_transmit(&self, sample: &Sample) -> Result<Vec<f64>> {
        if !matches!(self.kind, PipelineKind::Approach2 | PipelineKind::Toc) {
            return Err(Error::Config(format!(
                "pipeline {} has no transmit encoder",
                self.kind.as_str()
            )));
        }
        let enc = &self.nets[0];
        let x = Matrix::from_row(&sample.iq);
        let (y, _) = enc.forward(&x, Mode::Eval, &mut ForwardRngs::from_seed(0))?;
        Ok(y.row(0).to_vec())
    }

    /// Predicted labels for a batch, eval-mode forward (dropout off, channel
    /// noise on). Argmax ties break toward the lower label index.
    pub fn predict(&self, batch: &Matrix, eval_seed: u64) -> Result<Vec<u8>> {
        let net = self.inference_chain()?;
        let mut rngs = ForwardRngs::from_seed(derive_seed(eval_seed, &[stream::EVAL]));
        let (out, _) = net.forward(batch, Mode::Eval, &mut rngs)?;
        Ok((0..out.rows()).map(|r| argmax(out.row(r)) as u8).collect())
    }

    /// Total trainable parameters across all networks.
    pub fn param_count(&self) -> usize {
        self.nets.iter().map(Network::param_count).sum()
    }
}

/// Accuracy and confusion counts of a pipeline over labelled samples.
pub fn evaluate(tp: &TrainedPipeline, samples: &[Sample], eval_seed: u64) -> Result<EvalReport> {
    if samples.is_empty() {
        return Err(Error::Config("evaluate over empty sample set".into()));
    }
    let batch = to_matrix(samples)?;
    let preds = tp.predict(&batch, eval_seed)?;
    let mut confusion = [[0usize; 2]; 2];
    for (s, &p) in samples.iter().zip(&preds) {
        confusion[s.label as usize][p as usize] += 1;
    }
    let correct = confusion[0][0] + confusion[1][1];
    Ok(EvalReport {
        accuracy: correct as f64 / samples.len() as f64,
        confusion,
        n: samples.len(),
    })
}

pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Stacks samples into a batch matrix.
pub(crate) fn to_matrix(samples: &[Sample]) -> Result<Matrix> {
    let rows: Vec<&[f64]> = samples.iter().map(|s| s.iq.as_slice()).collect();
    Matrix::from_rows(&rows)
}

/// One-hot targets for two classes.
pub(crate) fn one_hot(labels: &[u8]) -> Matrix {
    let mut m = Matrix::zeros(labels.len(), 2);
    for (r, &l) in labels.iter().enumerate() {
        m.row_mut(r)[l as usize] = 1.0;
    }
    m
}

/// Concatenates networks, inserting a Gaussian-noise channel layer between
/// the first part and the rest when `snr_c_db` is given.
pub(crate) fn chain(parts: &[&Network], snr_c_db: Option<f64>) -> Result<Network> {
    let mut specs: Vec<LayerSpec> = Vec::new();
    let mut params = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        if i == 1 {
            if let Some(snr) = snr_c_db {
                specs.push(LayerSpec::GaussianNoise { snr_db: snr });
            }
        }
        specs.extend(part.specs().iter().cloned());
        params.extend(part.params().iter().cloned());
    }
    Network::from_parts(specs, params, parts[0].seed())
}

/// Splits a chained network back into its parts by spec counts, dropping the
/// channel layer that `chain` inserted after the first part.
pub(crate) fn split_chain(
    net: Network,
    spec_counts: &[usize],
    has_channel: bool,
) -> Result<Vec<Network>> {
    let (specs, params, seed) = net.into_parts();
    let mut out = Vec::new();
    let mut spec_at = 0;
    let mut param_at = 0;
    for (i, &n) in spec_counts.iter().enumerate() {
        if i == 1 && has_channel {
            spec_at += 1; // skip the inserted noise layer
        }
        let part_specs: Vec<LayerSpec> = specs[spec_at..spec_at + n].to_vec();
        let n_dense = part_specs
            .iter()
            .filter(|s| matches!(s, LayerSpec::Dense { .. }))
            .count();
        let part_params = params[param_at..param_at + n_dense].to_vec();
        out.push(Network::from_parts(part_specs, part_params, seed)?);
        spec_at += n;
        param_at += n_dense;
    }
    Ok(out)
}
