use rand::seq::SliceRandom;

use super::{
    build, chain, one_hot, split_chain, to_matrix, PipelineKind, TrainConfig, TrainedPipeline,
};
use crate::nn::{adam_step, loss, AdamState, ForwardRngs, LossKind, Matrix, Mode, Network};
use crate::rng::{derive_seed, stream, stream_rng};
use crate::signal::Dataset;
use crate::{Error, Result};

/// Builds and weight-initializes an untrained pipeline.
pub fn init_pipeline(kind: PipelineKind, seed: u64, snr_c_db: f64) -> TrainedPipeline {
    let mut nets = build(kind);
    let mut init_rng = stream_rng(seed, stream::WEIGHT_INIT);
    for net in &mut nets {
        net.init_weights(&mut init_rng);
        net.set_seed(seed);
    }
    TrainedPipeline { kind, nets, snr_c_db: snr_c_db, history: Vec::new() }
}

/// Trains a pipeline on the dataset's train split.
///
/// - `NoChannel`/`Approach1`: cross-entropy on (sample, label).
/// - `Approach2`: stage 1 jointly trains encoder + channel + decoder with
///   MSE against the edge device's input signal; stage 2 freezes them and
///   trains the classifier with cross-entropy on the (re-noised each epoch)
///   reconstructions.
/// - `Toc`: encoder + channel + decoder-classifier end-to-end with
///   cross-entropy. Channel noise is resampled every forward pass and its
///   backward pass is the identity.
pub fn train(kind: PipelineKind, dataset: &Dataset, cfg: &TrainConfig) -> Result<TrainedPipeline> {
    cfg.validate()?;
    if dataset.train.is_empty() {
        return Err(Error::Config("empty training split".into()));
    }
    let x = to_matrix(&dataset.train)?;
    let labels: Vec<u8> = dataset.train.iter().map(|s| s.label).collect();
    let y = one_hot(&labels);
    let mut tp = init_pipeline(kind, cfg.seed, cfg.snr_c_db);

    match kind {
        PipelineKind::NoChannel | PipelineKind::Approach1 => {
            let mut net = tp.nets.remove(0);
            tp.history = fit(&mut net, &x, &y, LossKind::CategoricalCrossEntropy, cfg, 0)?;
            tp.nets = vec![net];
        }
        PipelineKind::Toc => {
            let enc_specs = tp.nets[0].specs().len();
            let dec_specs = tp.nets[1].specs().len();
            let mut net = chain(&[&tp.nets[0], &tp.nets[1]], Some(cfg.snr_c_db))?;
            tp.history = fit(&mut net, &x, &y, LossKind::CategoricalCrossEntropy, cfg, 0)?;
            tp.nets = split_chain(net, &[enc_specs, dec_specs], true)?;
        }
        PipelineKind::Approach2 => {
            let enc_specs = tp.nets[0].specs().len();
            let dec_specs = tp.nets[1].specs().len();
            let clf_specs = tp.nets[2].specs().len();
            // Stage 1: reconstruct the received signal across the channel.
            let mut auto = chain(&[&tp.nets[0], &tp.nets[1]], Some(cfg.snr_c_db))?;
            let mut history = fit(&mut auto, &x, &x, LossKind::MeanSquaredError, cfg, 0)?;
            let frozen_dense = auto.params().len();
            let parts = split_chain(auto, &[enc_specs, dec_specs], true)?;
            // Stage 2: classifier on reconstructions, front end frozen.
            let mut full = chain(
                &[&parts[0], &parts[1], &tp.nets[2]],
                Some(cfg.snr_c_db),
            )?;
            history.extend(fit(
                &mut full,
                &x,
                &y,
                LossKind::CategoricalCrossEntropy,
                cfg,
                frozen_dense,
            )?);
            tp.history = history;
            tp.nets = split_chain(full, &[enc_specs, dec_specs, clf_specs], true)?;
        }
    }
    Ok(tp)
}

/// Minibatch Adam loop over one network. Returns per-epoch mean loss.
fn fit(
    net: &mut Network,
    x: &Matrix,
    y: &Matrix,
    kind: LossKind,
    cfg: &TrainConfig,
    frozen_prefix: usize,
) -> Result<Vec<f64>> {
    let n = x.rows();
    let mut adam = AdamState::new(net.params(), cfg.lr);
    let fwd_seed = derive_seed(cfg.seed, &[kind as u64, frozen_prefix as u64]);
    let mut rngs = ForwardRngs::from_seed(fwd_seed);
    let mut shuffle_rng = stream_rng(fwd_seed, stream::SHUFFLE);
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for idx in order.chunks(cfg.batch_size) {
            let xb = gather(x, idx);
            let yb = gather(y, idx);
            let (out, cache) = net.forward(&xb, Mode::Train, &mut rngs)?;
            let (value, grad) = loss(kind, &out, &yb)?;
            if !value.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            let (grads, _) = net.backward(&cache, &grad)?;
            adam_step(&mut adam, net.params_mut(), &grads, frozen_prefix)?;
            epoch_loss += value * idx.len() as f64;
        }
        history.push(epoch_loss / n as f64);
    }
    Ok(history)
}

fn gather(m: &Matrix, idx: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(idx.len(), m.cols());
    for (r, &i) in idx.iter().enumerate() {
        out.row_mut(r).copy_from_slice(m.row(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::evaluate;
    use crate::signal::{make_dataset, SensingConfig};

    fn small_dataset(seed: u64) -> Dataset {
        make_dataset(&SensingConfig {
            n_samples: 600,
            snr_s_db: 10.0,
            phase_impairment: false,
            seed,
        })
        .unwrap()
    }

    fn quick_cfg(seed: u64) -> TrainConfig {
        TrainConfig { epochs: 5, batch_size: 64, lr: 1e-3, seed, snr_c_db: 10.0 }
    }

    #[test]
    fn untrained_toc_is_at_chance() {
        let ds = small_dataset(1);
        let tp = init_pipeline(PipelineKind::Toc, 1, 10.0);
        let report = evaluate(&tp, &ds.test, 1).unwrap();
        assert!(
            (report.accuracy - 0.5).abs() < 0.12,
            "untrained accuracy {}",
            report.accuracy
        );
    }

    #[test]
    fn training_reduces_no_channel_loss() {
        let ds = small_dataset(2);
        let tp = train(PipelineKind::NoChannel, &ds, &quick_cfg(2)).unwrap();
        assert!(tp.history.last().unwrap() < tp.history.first().unwrap());
    }

    #[test]
    fn training_is_deterministic() {
        let ds = small_dataset(3);
        let a = train(PipelineKind::Toc, &ds, &quick_cfg(3)).unwrap();
        let b = train(PipelineKind::Toc, &ds, &quick_cfg(3)).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.nets[0].params(), b.nets[0].params());
        assert_eq!(a.nets[1].params(), b.nets[1].params());
    }

    #[test]
    fn approach2_carries_three_nets_and_trains_all_stages() {
        let ds = small_dataset(4);
        let cfg = TrainConfig { epochs: 2, ..quick_cfg(4) };
        let tp = train(PipelineKind::Approach2, &ds, &cfg).unwrap();
        assert_eq!(tp.nets.len(), 3);
        assert_eq!(tp.history.len(), 4); // two stages, two epochs each
        assert_eq!(tp.param_count(), 93_606);
    }

    #[test]
    fn encode_transmit_has_unit_mean_power() {
        let ds = small_dataset(5);
        let tp = train(PipelineKind::Toc, &ds, &quick_cfg(5)).unwrap();
        let sym = tp.encode_transmit(&ds.test[0]).unwrap();
        assert_eq!(sym.len(), 2);
        let ms: f64 = sym.iter().map(|v| v * v).sum::<f64>() / sym.len() as f64;
        assert!((ms - 1.0).abs() < 1e-12);
        let tp2 = train(PipelineKind::Approach2, &ds, &TrainConfig { epochs: 1, ..quick_cfg(5) }).unwrap();
        assert_eq!(tp2.encode_transmit(&ds.test[0]).unwrap().len(), 128);
    }

    #[test]
    fn no_channel_pipeline_has_no_transmit_encoder() {
        let tp = init_pipeline(PipelineKind::NoChannel, 1, 10.0);
        let ds = small_dataset(6);
        assert!(tp.encode_transmit(&ds.test[0]).is_err());
    }

    #[test]
    fn perfect_and_inverted_predictions_bound_accuracy() {
        // all predictions correct -> 1.0; complement labels -> 0.0
        let ds = small_dataset(7);
        let tp = train(PipelineKind::NoChannel, &ds, &TrainConfig { epochs: 8, ..quick_cfg(7) }).unwrap();
        let report = evaluate(&tp, &ds.test, 7).unwrap();
        let flipped: Vec<crate::signal::Sample> = ds
            .test
            .iter()
            .map(|s| crate::signal::Sample { iq: s.iq.clone(), label: 1 - s.label })
            .collect();
        let flipped_report = evaluate(&tp, &flipped, 7).unwrap();
        assert!((report.accuracy + flipped_report.accuracy - 1.0).abs() < 1e-12);
        let sum: usize = report.confusion.iter().flatten().sum();
        assert_eq!(sum, report.n);
    }
}
