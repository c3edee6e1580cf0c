//! I/Q dataset generation and channel/trigger primitives.
//!
//! One data sample is 64 complex constellation points, interleaved as 128
//! real values `(I0, Q0, I1, Q1, ...)`, with a modulation label. The sensing
//! channel adds AWGN at `SNR_s`; an optional per-sample random phase shift
//! models hardware impairments.

mod channel;
mod dataset;
mod io;
mod modem;

pub use channel::{apply_awgn, measure_snr, noise_sigma};
pub use dataset::make_dataset;
pub use io::{export_csv, load_dataset, save_dataset};
pub use modem::{apply_phase, gen_symbols, symbols_from_bits};

use serde::{Deserialize, Serialize};

/// Real values per sample (64 interleaved I/Q points).
pub const SAMPLE_DIM: usize = 128;
/// Complex points per sample.
pub const N_POINTS: usize = 64;

/// Modulation type, doubling as the class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modulation {
    /// Label 0 (the backdoor victim class).
    Bpsk,
    /// Label 1 (the backdoor target class).
    Qpsk,
}

impl Modulation {
    pub fn label(self) -> u8 {
        match self {
            Modulation::Bpsk => 0,
            Modulation::Qpsk => 1,
        }
    }

    pub fn from_label(label: u8) -> Option<Self> {
        match label {
            0 => Some(Modulation::Bpsk),
            1 => Some(Modulation::Qpsk),
            _ => None,
        }
    }
}

/// One labelled I/Q vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Exactly [`SAMPLE_DIM`] interleaved I/Q values.
    pub iq: Vec<f64>,
    pub label: u8,
}

/// Generation parameters for a sensing dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingConfig {
    pub n_samples: usize,
    pub snr_s_db: f64,
    pub phase_impairment: bool,
    pub seed: u64,
}

impl SensingConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.n_samples < 2 {
            return Err(crate::Error::Config("n_samples must be >= 2".into()));
        }
        if !self.snr_s_db.is_finite() {
            return Err(crate::Error::Config("snr_s_db must be finite".into()));
        }
        Ok(())
    }
}

/// Dataset provenance and bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub snr_s_db: f64,
    pub phase_impairment: bool,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    /// Counts of labels 0 and 1 over train+test.
    pub label_counts: [usize; 2],
}

/// Train/test split of generated samples. The split is by generation order
/// (first 80% train), so the two sets are disjoint by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub meta: DatasetMeta,
}
