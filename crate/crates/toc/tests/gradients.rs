//! Finite-difference oracle for the hand-written backward passes.
//!
//! Every analytic gradient (per layer kind and for each full pipeline
//! graph) is checked against central differences with `h = 1e-6` at seeded
//! random points; stochastic layers are frozen by re-seeding their RNG
//! streams so the finite-difference probes see the same draw.

use rand::Rng as _;

use toc::nn::{
    loss, Activation, ForwardRngs, LayerSpec, LossKind, Matrix, Mode, Network,
};
use toc::pipeline::{init_pipeline, PipelineKind};
use toc::rng::stream_rng;

const H: f64 = 1e-6;
const REL_TOL: f64 = 1e-5;

// The denominator floor keeps the check meaningful for near-zero
// gradients: central differences of an O(1) loss at h = 1e-6 carry about
// 1e-10 of cancellation noise, so below 1e-4 the comparison is absolute.
fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-4)
}

fn random_matrix(rows: usize, cols: usize, rng: &mut toc::rng::Rng) -> Matrix {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

/// Scalar loss of `net` at the current parameters for a fixed input,
/// target, mode, and frozen RNG seed.
fn scalar_loss(
    net: &Network,
    x: &Matrix,
    target: &Matrix,
    kind: LossKind,
    mode: Mode,
    rng_seed: u64,
) -> f64 {
    let mut rngs = ForwardRngs::from_seed(rng_seed);
    let (out, _) = net.forward(x, mode, &mut rngs).unwrap();
    loss(kind, &out, target).unwrap().0
}

/// Checks analytic parameter and input gradients against central
/// differences. Parameters are probed exhaustively when small, strided
/// otherwise; every input coordinate is probed.
fn check_network(net: &Network, x: &Matrix, target: &Matrix, kind: LossKind, mode: Mode) {
    let rng_seed = 1234;
    let mut rngs = ForwardRngs::from_seed(rng_seed);
    let (out, cache) = net.forward(x, mode, &mut rngs).unwrap();
    let (_, out_grad) = loss(kind, &out, target).unwrap();
    let (grads, input_grad) = net.backward(&cache, &out_grad).unwrap();

    let n_params = net.param_count();
    let stride = (n_params / 400).max(1);
    for (block, dense) in grads.dense.iter().enumerate() {
        for (wi, &analytic) in dense.weights.iter().enumerate() {
            if (block + wi) % stride != 0 {
                continue;
            }
            let probe = |delta: f64| {
                let mut plus = net.clone();
                plus.params_mut()[block].weights[wi] += delta;
                scalar_loss(&plus, x, target, kind, mode, rng_seed)
            };
            let fd = (probe(H) - probe(-H)) / (2.0 * H);
            assert!(
                rel_err(fd, analytic) < REL_TOL,
                "weight grad block {block} idx {wi}: fd {fd:e} vs analytic {analytic:e}"
            );
        }
        for (bi, &analytic) in dense.bias.iter().enumerate() {
            if (block + bi) % stride != 0 {
                continue;
            }
            let probe = |delta: f64| {
                let mut plus = net.clone();
                plus.params_mut()[block].bias[bi] += delta;
                scalar_loss(&plus, x, target, kind, mode, rng_seed)
            };
            let fd = (probe(H) - probe(-H)) / (2.0 * H);
            assert!(
                rel_err(fd, analytic) < REL_TOL,
                "bias grad block {block} idx {bi}: fd {fd:e} vs analytic {analytic:e}"
            );
        }
    }

    for r in 0..x.rows() {
        for c in 0..x.cols() {
            let probe = |delta: f64| {
                let mut xp = x.clone();
                xp.row_mut(r)[c] += delta;
                scalar_loss(net, &xp, target, kind, mode, rng_seed)
            };
            let fd = (probe(H) - probe(-H)) / (2.0 * H);
            let analytic = input_grad.row(r)[c];
            assert!(
                rel_err(fd, analytic) < REL_TOL,
                "input grad ({r},{c}): fd {fd:e} vs analytic {analytic:e}"
            );
        }
    }
}

fn dense_net(input: usize, output: usize, activation: Activation, seed: u64) -> Network {
    let mut net =
        Network::new(vec![LayerSpec::Dense { input, output, activation }]).unwrap();
    net.init_weights(&mut stream_rng(seed, 5));
    net
}

fn one_hot_rows(rows: usize, cols: usize, rng: &mut toc::rng::Rng) -> Matrix {
    let mut t = Matrix::zeros(rows, cols);
    for r in 0..rows {
        let hot = rng.random_range(0..cols);
        t.row_mut(r)[hot] = 1.0;
    }
    t
}

#[test]
fn dense_relu_gradients_match_finite_differences() {
    for point in 0..10 {
        let mut rng = stream_rng(100 + point, 1);
        let net = dense_net(6, 4, Activation::Relu, 200 + point);
        let x = random_matrix(3, 6, &mut rng);
        let target = random_matrix(3, 4, &mut rng);
        check_network(&net, &x, &target, LossKind::MeanSquaredError, Mode::Eval);
    }
}

#[test]
fn dense_tanh_gradients_match_finite_differences() {
    for point in 0..10 {
        let mut rng = stream_rng(300 + point, 1);
        let net = dense_net(5, 3, Activation::Tanh, 400 + point);
        let x = random_matrix(2, 5, &mut rng);
        let target = random_matrix(2, 3, &mut rng);
        check_network(&net, &x, &target, LossKind::MeanSquaredError, Mode::Eval);
    }
}

#[test]
fn dense_linear_gradients_match_finite_differences() {
    for point in 0..10 {
        let mut rng = stream_rng(500 + point, 1);
        let net = dense_net(4, 7, Activation::Linear, 600 + point);
        let x = random_matrix(3, 4, &mut rng);
        let target = random_matrix(3, 7, &mut rng);
        check_network(&net, &x, &target, LossKind::MeanSquaredError, Mode::Eval);
    }
}

#[test]
fn dense_softmax_cross_entropy_gradients_match_finite_differences() {
    for point in 0..10 {
        let mut rng = stream_rng(700 + point, 1);
        let net = dense_net(6, 3, Activation::Softmax, 800 + point);
        let x = random_matrix(4, 6, &mut rng);
        let target = one_hot_rows(4, 3, &mut rng);
        check_network(&net, &x, &target, LossKind::CategoricalCrossEntropy, Mode::Eval);
    }
}

#[test]
fn dropout_gradients_match_finite_differences_under_frozen_mask() {
    for point in 0..10 {
        let mut rng = stream_rng(900 + point, 1);
        let mut net = Network::new(vec![
            LayerSpec::Dense { input: 6, output: 6, activation: Activation::Relu },
            LayerSpec::Dropout { rate: 0.4 },
            LayerSpec::Dense { input: 6, output: 2, activation: Activation::Linear },
        ])
        .unwrap();
        net.init_weights(&mut stream_rng(1000 + point, 5));
        let x = random_matrix(3, 6, &mut rng);
        let target = random_matrix(3, 2, &mut rng);
        check_network(&net, &x, &target, LossKind::MeanSquaredError, Mode::Train);
    }
}

#[test]
fn power_norm_gradients_match_finite_differences() {
    for point in 0..10 {
        let mut rng = stream_rng(1100 + point, 1);
        let mut net = Network::new(vec![
            LayerSpec::Dense { input: 5, output: 4, activation: Activation::Linear },
            LayerSpec::PowerNorm,
        ])
        .unwrap();
        net.init_weights(&mut stream_rng(1200 + point, 5));
        let x = random_matrix(2, 5, &mut rng);
        let target = random_matrix(2, 4, &mut rng);
        check_network(&net, &x, &target, LossKind::MeanSquaredError, Mode::Eval);
    }
}

#[test]
fn gaussian_noise_gradients_match_finite_differences_under_frozen_draw() {
    for point in 0..10 {
        let mut rng = stream_rng(1300 + point, 1);
        let mut net = Network::new(vec![
            LayerSpec::Dense { input: 4, output: 4, activation: Activation::Tanh },
            LayerSpec::PowerNorm,
            LayerSpec::GaussianNoise { snr_db: 5.0 },
            LayerSpec::Dense { input: 4, output: 2, activation: Activation::Linear },
        ])
        .unwrap();
        net.init_weights(&mut stream_rng(1400 + point, 5));
        let x = random_matrix(2, 4, &mut rng);
        let target = random_matrix(2, 2, &mut rng);
        check_network(&net, &x, &target, LossKind::MeanSquaredError, Mode::Eval);
    }
}

/// Full pipeline graphs, exercised exactly as training sees them.
#[test]
fn classifier_pipeline_gradients_match_finite_differences() {
    for point in 0..10 {
        let mut rng = stream_rng(1500 + point, 1);
        let tp = init_pipeline(PipelineKind::NoChannel, 1600 + point, 10.0);
        let net = tp.inference_chain().unwrap();
        let x = random_matrix(2, 128, &mut rng);
        let target = one_hot_rows(2, 2, &mut rng);
        check_network(&net, &x, &target, LossKind::CategoricalCrossEntropy, Mode::Train);
    }
}

#[test]
fn autoencoder_pipeline_gradients_match_finite_differences() {
    for point in 0..10 {
        let mut rng = stream_rng(1700 + point, 1);
        let tp = init_pipeline(PipelineKind::Approach2, 1800 + point, 3.0);
        let net = tp.inference_chain().unwrap();
        let x = random_matrix(1, 128, &mut rng);
        let target = one_hot_rows(1, 2, &mut rng);
        check_network(&net, &x, &target, LossKind::CategoricalCrossEntropy, Mode::Train);
    }
}

#[test]
fn joint_pipeline_gradients_match_finite_differences() {
    for point in 0..10 {
        let mut rng = stream_rng(1900 + point, 1);
        let tp = init_pipeline(PipelineKind::Toc, 2000 + point, 0.0);
        let net = tp.inference_chain().unwrap();
        let x = random_matrix(2, 128, &mut rng);
        let target = one_hot_rows(2, 2, &mut rng);
        check_network(&net, &x, &target, LossKind::CategoricalCrossEntropy, Mode::Train);
    }
}
