use rand_distr::{Distribution, StandardNormal};

use super::{EvasionConfig, EvasionMode, Perturber};
use crate::nn::{loss, ForwardRngs, LossKind, Matrix, Mode};
use crate::pipeline::TrainedPipeline;
use crate::rng::{derive_seed, stream, Rng};
use crate::signal::Sample;
use crate::{Error, Result};

/// Single-step gradient-sign perturbation of one sample at the edge-device
/// input, white-box through the full inference chain with the channel noise
/// frozen to the single realization seeded by `realization_seed`. The same
/// seed must be used when classifying the perturbed sample: the adversary's
/// linearization is exact for the transmission it perturbs.
///
/// Non-targeted: `x + ε·sign(∇_x CE(f(x), true label))`; targeted:
/// `x − ε·sign(∇_x CE(f(x), target label))`, with `sign(0) = 0` and
/// `ε = σ·10^(pnr/20)`. Returns the perturbed sample and a flag that is true
/// when the gradient vanished everywhere (sample returned unchanged).
pub fn fgsm(
    tp: &TrainedPipeline,
    sample: &Sample,
    cfg: &EvasionConfig,
    sensing_noise_sigma: f64,
    realization_seed: u64,
) -> Result<(Sample, bool)> {
    cfg.validate()?;
    if cfg.perturber != Perturber::Fgsm {
        return Err(Error::Config("fgsm called with a non-FGSM perturber".into()));
    }
    let net = tp.inference_chain()?;
    let x = Matrix::from_row(&sample.iq);
    let mut rngs = ForwardRngs::from_seed(realization_seed);
    let (out, cache) = net.forward(&x, Mode::Eval, &mut rngs)?;
    let (loss_label, step_sign) = match cfg.mode {
        EvasionMode::NonTargeted => (sample.label, 1.0),
        EvasionMode::Targeted { target } => (target, -1.0),
    };
    let mut target_row = Matrix::zeros(1, out.cols());
    target_row.row_mut(0)[loss_label as usize] = 1.0;
    let (_, out_grad) = loss(LossKind::CategoricalCrossEntropy, &out, &target_row)?;
    let (_, input_grad) = net.backward(&cache, &out_grad)?;
    if input_grad.data().iter().all(|&g| g == 0.0) {
        return Ok((sample.clone(), true));
    }
    let eps = cfg.epsilon(sensing_noise_sigma);
    let iq: Vec<f64> = sample
        .iq
        .iter()
        .zip(input_grad.row(0))
        .map(|(&v, &g)| v + step_sign * eps * sign(g))
        .collect();
    Ok((Sample { iq, label: sample.label }, false))
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Gaussian-noise perturbation at the same per-component amplitude budget as
/// FGSM (`ε = σ·10^(pnr/20)` used as the noise std): the conventional
/// jamming baseline.
pub fn gaussian_perturb(
    sample: &Sample,
    pnr_db: f64,
    sensing_noise_sigma: f64,
    rng: &mut Rng,
) -> Sample {
    let eps = sensing_noise_sigma * 10f64.powf(pnr_db / 20.0);
    let iq: Vec<f64> = sample
        .iq
        .iter()
        .map(|&v| {
            let n: f64 = StandardNormal.sample(rng);
            v + eps * n
        })
        .collect();
    Sample { iq, label: sample.label }
}

/// Runs an evasion attack over a clean-trained pipeline's test set.
///
/// Targeted mode perturbs only victim-label samples (every label other than
/// the target) and reports accuracy on them; non-targeted mode perturbs all
/// samples and reports overall accuracy. Each sample is transmitted through
/// one channel-noise realization; the FGSM gradient is taken through that
/// same frozen realization, and the Gaussian baseline is classified through
/// an identically drawn one, so the two perturbers face the same channel.
pub fn eval_evasion(
    tp: &TrainedPipeline,
    test: &[Sample],
    cfg: &EvasionConfig,
    sensing_noise_sigma: f64,
) -> Result<f64> {
    cfg.validate()?;
    let selected: Vec<&Sample> = match cfg.mode {
        EvasionMode::Targeted { target } => {
            test.iter().filter(|s| s.label != target).collect()
        }
        EvasionMode::NonTargeted => test.iter().collect(),
    };
    if selected.is_empty() {
        return Err(Error::Config("empty sample selection for evasion".into()));
    }
    let mut noise_rng =
        crate::rng::stream_rng(derive_seed(cfg.seed, &[stream::ATTACK, 2]), stream::ATTACK);
    let net = tp.inference_chain()?;
    let mut correct = 0usize;
    for (i, s) in selected.iter().enumerate() {
        let realization_seed = derive_seed(cfg.seed, &[stream::CHANNEL, i as u64]);
        let p = match cfg.perturber {
            Perturber::Fgsm => {
                fgsm(tp, s, cfg, sensing_noise_sigma, realization_seed)?.0
            }
            Perturber::GaussianNoise => {
                gaussian_perturb(s, cfg.pnr_db, sensing_noise_sigma, &mut noise_rng)
            }
        };
        let mut rngs = ForwardRngs::from_seed(realization_seed);
        let (out, _) = net.forward(&Matrix::from_row(&p.iq), Mode::Eval, &mut rngs)?;
        if crate::pipeline::argmax(out.row(0)) as u8 == s.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / selected.len() as f64)
}
