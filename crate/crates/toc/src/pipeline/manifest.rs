//! On-disk pipelines: one weight file per network plus a JSON manifest
//! recording kind, SNR, seed, and hyperparameters.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PipelineKind, TrainConfig, TrainedPipeline};
use crate::nn::{load_weights, save_weights};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: PipelineKind,
    pub snr_c_db: f64,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub net_files: Vec<String>,
    pub final_loss: Option<f64>,
}

pub fn save_pipeline(tp: &TrainedPipeline, cfg: &TrainConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut net_files = Vec::new();
    for (i, net) in tp.nets.iter().enumerate() {
        let name = format!("net_{i}.tcnn");
        save_weights(net, &dir.join(&name))?;
        net_files.push(name);
    }
    let manifest = Manifest {
        kind: tp.kind,
        snr_c_db: tp.snr_c_db,
        seed: cfg.seed,
        epochs: cfg.epochs,
        batch_size: cfg.batch_size,
        lr: cfg.lr,
        net_files,
        final_loss: tp.history.last().copied(),
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

pub fn load_pipeline(dir: &Path) -> Result<TrainedPipeline> {
    let manifest: Manifest =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let mut nets = Vec::new();
    for name in &manifest.net_files {
        nets.push(load_weights(&dir.join(name))?);
    }
    let expected = match manifest.kind {
        PipelineKind::NoChannel | PipelineKind::Approach1 => 1,
        PipelineKind::Approach2 => 3,
        PipelineKind::Toc => 2,
    };
    if nets.len() != expected {
        return Err(Error::Corrupt(format!(
            "{} pipeline with {} networks",
            manifest.kind.as_str(),
            nets.len()
        )));
    }
    Ok(TrainedPipeline {
        kind: manifest.kind,
        nets,
        snr_c_db: manifest.snr_c_db,
        history: Vec::new(),
    })
}
