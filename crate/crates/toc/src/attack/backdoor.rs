use super::{BackdoorConfig, BackdoorReport, TauDenominator};
use crate::pipeline::{evaluate, TrainedPipeline};
use crate::rng::{stream, stream_rng};
use crate::signal::{apply_phase, Dataset, Sample};
use crate::{Error, Result};

/// Poisons a dataset: picks `⌊tau·denominator⌋` victim-label training
/// samples uniformly at random, rotates each by the trigger phase, and
/// relabels them to the target. The test split is untouched. Returns the
/// poisoned dataset and the sorted indices of poisoned training samples.
pub fn poison_dataset(ds: &Dataset, cfg: &BackdoorConfig) -> Result<(Dataset, Vec<usize>)> {
    cfg.validate()?;
    let victim_idx: Vec<usize> = ds
        .train
        .iter()
        .enumerate()
        .filter(|(_, s)| s.label == cfg.victim)
        .map(|(i, _)| i)
        .collect();
    if victim_idx.is_empty() {
        return Err(Error::Config("no victim-label training samples".into()));
    }
    let denom = match cfg.denominator {
        TauDenominator::VictimClass => victim_idx.len(),
        TauDenominator::AllTrain => ds.train.len(),
    };
    let n_poison = (cfg.tau * denom as f64).floor() as usize;
    if n_poison == 0 {
        return Err(Error::Config(format!(
            "tau {} rounds to zero poisoned samples",
            cfg.tau
        )));
    }
    if n_poison > victim_idx.len() {
        return Err(Error::Config(format!(
            "tau {} asks for {n_poison} poisoned samples but only {} victim samples exist",
            cfg.tau,
            victim_idx.len()
        )));
    }
    let mut rng = stream_rng(cfg.seed, stream::ATTACK);
    let picks = rand::seq::index::sample(&mut rng, victim_idx.len(), n_poison);
    let mut mask: Vec<usize> = picks.into_iter().map(|i| victim_idx[i]).collect();
    mask.sort_unstable();

    let mut poisoned = ds.clone();
    for &i in &mask {
        let s = &mut poisoned.train[i];
        s.iq = apply_phase(&s.iq, cfg.theta);
        s.label = cfg.target;
    }
    poisoned.meta.label_counts[cfg.victim as usize] -= mask.len();
    poisoned.meta.label_counts[cfg.target as usize] += mask.len();
    Ok((poisoned, mask))
}

/// Evaluates a (poison-trained) pipeline on the clean test split: accuracy
/// w.r.t. the original victim label on triggered victim samples, and clean
/// accuracy on the untouched victim / target partitions.
pub fn eval_backdoor(
    tp: &TrainedPipeline,
    clean_test: &[Sample],
    cfg: &BackdoorConfig,
    eval_seed: u64,
) -> Result<BackdoorReport> {
    cfg.validate()?;
    let victims: Vec<Sample> = clean_test
        .iter()
        .filter(|s| s.label == cfg.victim)
        .cloned()
        .collect();
    let targets: Vec<Sample> = clean_test
        .iter()
        .filter(|s| s.label == cfg.target)
        .cloned()
        .collect();
    if victims.is_empty() || targets.is_empty() {
        return Err(Error::Config("empty per-label test partition".into()));
    }
    let triggered: Vec<Sample> = victims
        .iter()
        .map(|s| Sample { iq: apply_phase(&s.iq, cfg.theta), label: cfg.victim })
        .collect();
    Ok(BackdoorReport {
        acc_poisoned_victim: evaluate(tp, &triggered, eval_seed)?.accuracy,
        acc_clean_victim: evaluate(tp, &victims, eval_seed)?.accuracy,
        acc_clean_target: evaluate(tp, &targets, eval_seed)?.accuracy,
    })
}
