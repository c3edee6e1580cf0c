//! Backdoor (Trojan) poisoning and evasion attacks on trained pipelines.
//!
//! The backdoor attack rotates a fraction of victim-label training samples
//! by a trigger phase and relabels them; at test time the same trigger flips
//! the prediction while clean samples classify normally. The evasion attack
//! perturbs test inputs at the edge device, either along the sign of the
//! end-to-end loss gradient (FGSM) or with Gaussian noise as the
//! conventional-jamming baseline, at a fixed perturbation-to-noise ratio.

mod backdoor;
mod evasion;

pub use backdoor::{eval_backdoor, poison_dataset};
pub use evasion::{eval_evasion, fgsm, gaussian_perturb};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which pool the Trojan ratio is a fraction of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauDenominator {
    /// Fraction of victim-label training samples (default reading).
    #[default]
    VictimClass,
    /// Fraction of all training samples.
    AllTrain,
}

/// Backdoor attack parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackdoorConfig {
    pub victim: u8,
    pub target: u8,
    /// Trigger phase shift in radians.
    pub theta: f64,
    /// Trojan ratio.
    pub tau: f64,
    pub seed: u64,
    #[serde(default)]
    pub denominator: TauDenominator,
}

impl BackdoorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.victim == self.target {
            return Err(Error::Config("victim and target labels must differ".into()));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::Config("tau must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Three-way backdoor success metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackdoorReport {
    /// Accuracy w.r.t. the original victim label on triggered victim samples
    /// (low = effective attack).
    pub acc_poisoned_victim: f64,
    /// Accuracy on untouched victim-label samples (high = stealthy).
    pub acc_clean_victim: f64,
    /// Accuracy on untouched target-label samples.
    pub acc_clean_target: f64,
}

/// Evasion attack mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvasionMode {
    /// Minimize the loss toward `target`; perturbs only victim-label samples.
    Targeted { target: u8 },
    /// Maximize the loss for the true label; perturbs all samples.
    NonTargeted,
}

/// Perturbation generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturber {
    Fgsm,
    GaussianNoise,
}

/// Evasion attack parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvasionConfig {
    pub mode: EvasionMode,
    /// Perturbation-to-noise ratio in dB, relative to the sensing-channel
    /// noise power.
    pub pnr_db: f64,
    pub perturber: Perturber,
    pub seed: u64,
}

impl EvasionConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.pnr_db.is_finite() {
            return Err(Error::Config("pnr_db must be finite".into()));
        }
        Ok(())
    }

    /// Perturbation amplitude: `ε = σ·10^(pnr/20)` against the sensing-noise
    /// per-component std `σ`.
    pub fn epsilon(&self, sensing_noise_sigma: f64) -> f64 {
        sensing_noise_sigma * 10f64.powf(self.pnr_db / 20.0)
    }
}
