use rayon::prelude::*;

use super::{AttackSpec, Record, SweepConfig, SweepResult};
use crate::attack::{eval_backdoor, eval_evasion, poison_dataset, BackdoorConfig, EvasionConfig};
use crate::pipeline::{train, PipelineKind, TrainConfig};
use crate::rng::derive_seed;
use crate::signal::{make_dataset, noise_sigma, Dataset, SensingConfig};
use crate::{Error, Result};

const TAG_DATASET: u64 = 0x5eed_da7a;
const TAG_TRAIN: u64 = 0x5eed_1ea4;
const TAG_POISON: u64 = 0x5eed_bad0;
const TAG_EVAL: u64 = 0x5eed_e7a1;
const TAG_ATTACK: u64 = 0x5eed_a77c;

#[derive(Clone, Copy)]
struct Cell {
    kind: PipelineKind,
    snr_s_db: f64,
    snr_c_db: f64,
    seed: u64,
}

/// Runs the full grid: per (pipeline, SNR_s, SNR_c, seed) cell a dataset is
/// generated at SNR_s, a model trained at SNR_c, clean accuracy evaluated,
/// and every configured attack executed. Cells run independently (bounded by
/// `workers`); records are sorted before being returned, so the outcome does
/// not depend on completion order. A cell whose training diverges yields a
/// `failed` record and the sweep continues.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &kind in &cfg.pipelines {
        for &snr_s_db in &cfg.snr_s_grid {
            for &snr_c_db in &cfg.snr_c_grid {
                for &seed in &cfg.seeds {
                    cells.push(Cell { kind, snr_s_db, snr_c_db, seed });
                }
            }
        }
    }

    let run = || -> Vec<Vec<Record>> {
        cells
            .par_iter()
            .map(|cell| run_cell(cfg, cell))
            .collect()
    };
    let nested = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut records: Vec<Record> = nested.into_iter().flatten().collect();
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(SweepResult { records })
}

fn cell_dataset(cfg: &SweepConfig, cell: &Cell) -> Result<Dataset> {
    make_dataset(&SensingConfig {
        n_samples: cfg.n_samples,
        snr_s_db: cell.snr_s_db,
        phase_impairment: cfg.phase_impairment,
        seed: derive_seed(cell.seed, &[TAG_DATASET, cell.snr_s_db.to_bits()]),
    })
}

fn run_cell(cfg: &SweepConfig, cell: &Cell) -> Vec<Record> {
    match try_run_cell(cfg, cell) {
        Ok(records) => records,
        Err(err) => {
            eprintln!(
                "cell ({}, snr_s={}, snr_c={}, seed={}) failed: {err}",
                cell.kind.as_str(),
                cell.snr_s_db,
                cell.snr_c_db,
                cell.seed
            );
            vec![record(cell, None, None, "failed", 1.0)]
        }
    }
}

fn try_run_cell(cfg: &SweepConfig, cell: &Cell) -> Result<Vec<Record>> {
    let ds = cell_dataset(cfg, cell)?;
    // No-channel pipelines ignore SNR_c entirely: derive their seeds without
    // it so every cell in a row trains the identical model.
    let mut train_parts = vec![TAG_TRAIN, cell.kind.id(), cell.snr_s_db.to_bits()];
    if cell.kind.has_channel() {
        train_parts.push(cell.snr_c_db.to_bits());
    }
    let train_seed = derive_seed(cell.seed, &train_parts);
    let train_cfg = TrainConfig {
        epochs: cfg.train.epochs,
        batch_size: cfg.train.batch_size,
        lr: cfg.train.lr,
        seed: train_seed,
        snr_c_db: cell.snr_c_db,
    };
    let tp = train(cell.kind, &ds, &train_cfg)?;
    let eval_seed = derive_seed(train_seed, &[TAG_EVAL]);
    let mut out = vec![record(
        cell,
        None,
        None,
        "accuracy",
        crate::pipeline::evaluate(&tp, &ds.test, eval_seed)?.accuracy,
    )];

    for (ai, attack) in cfg.attacks.iter().enumerate() {
        match attack {
            AttackSpec::Backdoor { theta, tau, denominator } => {
                let bd = BackdoorConfig {
                    victim: 0,
                    target: 1,
                    theta: *theta,
                    tau: *tau,
                    seed: derive_seed(train_seed, &[TAG_ATTACK, ai as u64]),
                    denominator: *denominator,
                };
                let (poisoned, _) = poison_dataset(&ds, &bd)?;
                let poisoned_cfg = TrainConfig {
                    seed: derive_seed(train_seed, &[TAG_POISON, ai as u64]),
                    ..train_cfg.clone()
                };
                let poisoned_tp = train(cell.kind, &poisoned, &poisoned_cfg)?;
                let report = eval_backdoor(&poisoned_tp, &ds.test, &bd, eval_seed)?;
                let param = Some(format!("tau={tau}"));
                out.push(record(cell, Some("backdoor"), param.clone(), "acc_poisoned_victim", report.acc_poisoned_victim));
                out.push(record(cell, Some("backdoor"), param.clone(), "acc_clean_victim", report.acc_clean_victim));
                out.push(record(cell, Some("backdoor"), param, "acc_clean_target", report.acc_clean_target));
            }
            AttackSpec::Evasion { mode, perturber, pnr_db } => {
                let ev = EvasionConfig {
                    mode: mode.to_mode(),
                    pnr_db: *pnr_db,
                    perturber: *perturber,
                    seed: derive_seed(train_seed, &[TAG_ATTACK, ai as u64]),
                };
                let sigma = noise_sigma(cell.snr_s_db);
                let acc = eval_evasion(&tp, &ds.test, &ev, sigma)?;
                let name = match perturber {
                    crate::attack::Perturber::Fgsm => format!("fgsm_{}", mode.as_str()),
                    crate::attack::Perturber::GaussianNoise => {
                        format!("gaussian_{}", mode.as_str())
                    }
                };
                out.push(record(cell, Some(&name), Some(format!("pnr={pnr_db}")), "accuracy", acc));
            }
        }
    }
    Ok(out)
}

fn record(cell: &Cell, attack: Option<&str>, param: Option<String>, metric: &str, value: f64) -> Record {
    Record {
        pipeline: cell.kind.as_str().to_string(),
        snr_s_db: cell.snr_s_db,
        snr_c_db: cell.snr_c_db,
        seed: cell.seed,
        attack: attack.map(str::to_string),
        param,
        metric: metric.to_string(),
        value,
    }
}
