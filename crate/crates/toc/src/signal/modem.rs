use rand::Rng as _;

use super::Modulation;
use crate::rng::Rng;

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Maps an explicit bit sequence to constellation points.
///
/// BPSK consumes one bit per symbol: `b -> (2b-1, 0)`. QPSK consumes bit
/// pairs with Gray mapping: `00 -> (+,+)`, `01 -> (-,+)`, `11 -> (-,-)`,
/// `10 -> (+,-)`, each scaled to unit power by `1/sqrt(2)`.
pub fn symbols_from_bits(modulation: Modulation, bits: &[u8]) -> Vec<(f64, f64)> {
    match modulation {
        Modulation::Bpsk => bits
            .iter()
            .map(|&b| ((2.0 * b as f64 - 1.0), 0.0))
            .collect(),
        Modulation::Qpsk => bits
            .chunks_exact(2)
            .map(|pair| {
                let (b0, b1) = (pair[0], pair[1]);
                let i = if b1 == 0 { INV_SQRT2 } else { -INV_SQRT2 };
                let q = if b0 == 0 { INV_SQRT2 } else { -INV_SQRT2 };
                (i, q)
            })
            .collect(),
    }
}

/// Generates `n` random constellation points with unit average power.
pub fn gen_symbols(modulation: Modulation, n: usize, rng: &mut Rng) -> Vec<(f64, f64)> {
    let bits_per_symbol = match modulation {
        Modulation::Bpsk => 1,
        Modulation::Qpsk => 2,
    };
    let bits: Vec<u8> = (0..n * bits_per_symbol).map(|_| rng.random_range(0..2u8)).collect();
    symbols_from_bits(modulation, &bits)
}

/// Rotates each complex point by `theta` radians, preserving magnitude.
pub fn apply_phase(iq: &[f64], theta: f64) -> Vec<f64> {
    let (c, s) = (theta.cos(), theta.sin());
    iq.chunks_exact(2)
        .flat_map(|p| {
            let (i, q) = (p[0], p[1]);
            [i * c - q * s, i * s + q * c]
        })
        .collect()
}
