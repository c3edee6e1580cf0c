use rand_distr::{Distribution, StandardNormal};

use crate::rng::Rng;
use crate::{Error, Result};

/// Adds AWGN at the requested SNR, returning a new payload.
///
/// SNR is defined per complex sample: with `P` the mean per-point power
/// `|I|²+|Q|²`, each real component receives independent zero-mean Gaussian
/// noise with variance `P / (2·10^(snr_db/10))`.
pub fn apply_awgn(iq: &[f64], snr_db: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    let n_points = iq.len() / 2;
    let power: f64 = iq.iter().map(|v| v * v).sum::<f64>() / n_points.max(1) as f64;
    if power == 0.0 {
        return Err(Error::Domain("zero-power input: SNR undefined".into()));
    }
    let sigma = (power / (2.0 * 10f64.powf(snr_db / 10.0))).sqrt();
    Ok(iq
        .iter()
        .map(|&v| {
            let n: f64 = StandardNormal.sample(rng);
            v + sigma * n
        })
        .collect())
}

/// Per-real-component noise standard deviation of the sensing channel at the
/// given SNR for a unit-power signal. Used as the PNR reference for attacks.
pub fn noise_sigma(snr_db: f64) -> f64 {
    (1.0 / (2.0 * 10f64.powf(snr_db / 10.0))).sqrt()
}

/// Measured SNR in dB: `10·log10(P_clean / P_noise)` with `P_noise` the mean
/// power of `noisy - clean`.
pub fn measure_snr(clean: &[f64], noisy: &[f64]) -> Result<f64> {
    if clean.len() != noisy.len() {
        return Err(Error::Shape(format!(
            "length mismatch: {} vs {}",
            clean.len(),
            noisy.len()
        )));
    }
    let p_clean: f64 = clean.iter().map(|v| v * v).sum::<f64>() / clean.len() as f64;
    if p_clean == 0.0 {
        return Err(Error::Domain("clean payload has zero power".into()));
    }
    let p_noise: f64 = clean
        .iter()
        .zip(noisy)
        .map(|(c, n)| (n - c) * (n - c))
        .sum::<f64>()
        / clean.len() as f64;
    if p_noise == 0.0 {
        return Err(Error::Domain("identical payloads: SNR is infinite".into()));
    }
    Ok(10.0 * (p_clean / p_noise).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, stream_rng};

    #[test]
    fn zero_db_on_unit_power_gives_half_variance_per_component() {
        // 10^5 unit-power points, snr 0 dB: per-component variance 0.5
        let iq: Vec<f64> = (0..200_000)
            .map(|i| if i % 2 == 0 { 1.0 } else { 0.0 })
            .collect();
        let mut rng = stream_rng(1, stream::DATASET_NOISE);
        let noisy = apply_awgn(&iq, 0.0, &mut rng).unwrap();
        let var: f64 = iq
            .iter()
            .zip(&noisy)
            .map(|(c, n)| (n - c) * (n - c))
            .sum::<f64>()
            / iq.len() as f64;
        assert!((var - 0.5).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn huge_snr_leaves_input_unchanged() {
        let iq = [1.0, -0.5, 0.3, 0.8];
        let mut rng = stream_rng(1, stream::DATASET_NOISE);
        let noisy = apply_awgn(&iq, 300.0, &mut rng).unwrap();
        for (a, b) in iq.iter().zip(&noisy) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_power_input_is_a_domain_error() {
        let mut rng = stream_rng(1, stream::DATASET_NOISE);
        assert!(matches!(
            apply_awgn(&[0.0; 8], 5.0, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn measured_snr_definition() {
        // noise power equal to signal power -> 0 dB
        let clean = [1.0, 1.0, 1.0, 1.0];
        let noisy = [2.0, 0.0, 2.0, 0.0];
        assert!((measure_snr(&clean, &noisy).unwrap() - 0.0).abs() < 1e-12);
        // noise power = signal power / 10 -> 10 dB
        let s = 0.1f64.sqrt();
        let noisy10: Vec<f64> = clean.iter().map(|v| v + s).collect();
        assert!((measure_snr(&clean, &noisy10).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn identical_payloads_are_a_domain_error() {
        let x = [1.0, 2.0];
        assert!(matches!(measure_snr(&x, &x), Err(Error::Domain(_))));
    }

    #[test]
    fn awgn_round_trip_calibration_at_3db() {
        let iq: Vec<f64> = (0..200_000)
            .map(|i| if i % 4 < 2 { 0.7 } else { -0.9 })
            .collect();
        let mut rng = stream_rng(2, stream::DATASET_NOISE);
        let noisy = apply_awgn(&iq, 3.0, &mut rng).unwrap();
        let snr = measure_snr(&iq, &noisy).unwrap();
        assert!((snr - 3.0).abs() < 0.1, "measured {snr}");
    }

    #[test]
    fn noise_sigma_matches_awgn_convention() {
        // unit-power signal at 0 dB: per-component sigma^2 = 0.5
        assert!((noise_sigma(0.0).powi(2) - 0.5).abs() < 1e-15);
        assert!((noise_sigma(10.0).powi(2) - 0.05).abs() < 1e-15);
    }
}
