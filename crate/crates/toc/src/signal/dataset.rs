use rand::Rng as _;

use super::{apply_awgn, apply_phase, gen_symbols, Dataset, DatasetMeta, Modulation, Sample, SensingConfig, N_POINTS};
use crate::rng::{stream, stream_rng};
use crate::Result;

/// Generates a labelled sensing dataset.
///
/// Per sample: a uniform random label, 64 random constellation points, an
/// optional uniform random phase shift in `[0, 2π)` (hardware impairment),
/// then AWGN at `snr_s`. The first 80% of the generation order is the train
/// split, the rest test. Fully determined by `cfg.seed`.
pub fn make_dataset(cfg: &SensingConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut labels_rng = stream_rng(cfg.seed, stream::DATASET_LABELS);
    let mut bits_rng = stream_rng(cfg.seed, stream::DATASET_BITS);
    let mut phase_rng = stream_rng(cfg.seed, stream::DATASET_PHASE);
    let mut noise_rng = stream_rng(cfg.seed, stream::DATASET_NOISE);

    let mut samples = Vec::with_capacity(cfg.n_samples);
    let mut label_counts = [0usize; 2];
    for _ in 0..cfg.n_samples {
        let modulation = if labels_rng.random_range(0..2u8) == 0 {
            Modulation::Bpsk
        } else {
            Modulation::Qpsk
        };
        label_counts[modulation.label() as usize] += 1;
        let points = gen_symbols(modulation, N_POINTS, &mut bits_rng);
        let mut iq: Vec<f64> = points.iter().flat_map(|&(i, q)| [i, q]).collect();
        if cfg.phase_impairment {
            let theta = phase_rng.random::<f64>() * std::f64::consts::TAU;
            iq = apply_phase(&iq, theta);
        }
        let iq = apply_awgn(&iq, cfg.snr_s_db, &mut noise_rng)?;
        samples.push(Sample { iq, label: modulation.label() });
    }

    let n_train = cfg.n_samples * 4 / 5;
    let test = samples.split_off(n_train);
    let meta = DatasetMeta {
        snr_s_db: cfg.snr_s_db,
        phase_impairment: cfg.phase_impairment,
        seed: cfg.seed,
        n_train,
        n_test: test.len(),
        label_counts,
    };
    Ok(Dataset { train: samples, test, meta })
}
