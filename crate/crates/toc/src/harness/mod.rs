//! Experiment orchestration: SNR-grid sweeps, multi-seed averaging, and
//! CSV/JSON/SVG result rendering.
//!
//! A sweep trains one model per (pipeline, SNR_s, SNR_c, seed) grid cell,
//! evaluates clean accuracy, runs any configured attacks, and appends flat
//! records sorted by key so identical configs produce byte-identical output
//! files regardless of execution order.

mod aggregate;
mod render;
mod sweep;

pub use aggregate::{aggregate, AggRow, GroupField};
pub use render::{parse_csv, render_csv, render_json, render_svg};
pub use sweep::run_sweep;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::attack::{EvasionMode, Perturber, TauDenominator};
use crate::pipeline::PipelineKind;
use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

/// Training hyperparameters shared by every cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings { epochs: 100, batch_size: 64, lr: 1e-3 }
    }
}

/// One attack to run at every grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AttackSpec {
    /// Phase-trigger poisoning; trains an extra poisoned model per cell.
    Backdoor {
        theta: f64,
        tau: f64,
        #[serde(default)]
        denominator: TauDenominator,
    },
    /// Test-time perturbation of the clean-trained model.
    Evasion {
        mode: EvasionModeSpec,
        perturber: Perturber,
        pnr_db: f64,
    },
}

/// Serializable evasion mode (victim/target fixed to BPSK -> QPSK).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvasionModeSpec {
    Targeted,
    NonTargeted,
}

impl EvasionModeSpec {
    pub fn to_mode(self) -> EvasionMode {
        match self {
            EvasionModeSpec::Targeted => EvasionMode::Targeted { target: 1 },
            EvasionModeSpec::NonTargeted => EvasionMode::NonTargeted,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EvasionModeSpec::Targeted => "targeted",
            EvasionModeSpec::NonTargeted => "non_targeted",
        }
    }
}

/// Full sweep description; the JSON schema carries a version tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub version: u32,
    pub pipelines: Vec<PipelineKind>,
    pub snr_s_grid: Vec<f64>,
    pub snr_c_grid: Vec<f64>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub attacks: Vec<AttackSpec>,
    #[serde(default)]
    pub train: TrainSettings,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub phase_impairment: bool,
    pub output_dir: PathBuf,
    /// Upper bound on concurrent grid cells; default: one per CPU.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_n_samples() -> usize {
    5000
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} (supported: {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.pipelines.is_empty() {
            return Err(Error::Config("pipelines must be nonempty".into()));
        }
        if self.snr_s_grid.is_empty() || self.snr_c_grid.is_empty() {
            return Err(Error::Config("SNR grids must be nonempty".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must be nonempty".into()));
        }
        Ok(())
    }
}

/// One flat result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub pipeline: String,
    pub snr_s_db: f64,
    pub snr_c_db: f64,
    pub seed: u64,
    pub attack: Option<String>,
    pub param: Option<String>,
    pub metric: String,
    pub value: f64,
}

impl Record {
    /// Total order used to make result files reproducible.
    pub(crate) fn sort_key(&self) -> impl Ord + '_ {
        (
            self.pipeline.as_str(),
            ordered(self.snr_s_db),
            ordered(self.snr_c_db),
            self.seed,
            self.attack.as_deref().unwrap_or(""),
            self.param.as_deref().unwrap_or(""),
            self.metric.as_str(),
        )
    }
}

fn ordered(v: f64) -> i64 {
    // grid SNRs are small finite values; scale keeps ordering exact
    (v * 1e6) as i64
}

/// All records produced by a sweep, sorted by key.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<Record>,
}
