use super::PipelineKind;
use crate::nn::{Activation, LayerSpec, Network};

fn classifier() -> Network {
    let mut specs = Vec::new();
    let widths = [128usize, 128, 64, 32, 16, 8, 4];
    for w in widths.windows(2) {
        specs.push(LayerSpec::dense(w[0], w[1], Activation::Relu));
        specs.push(LayerSpec::Dropout { rate: 0.2 });
    }
    specs.push(LayerSpec::dense(4, 2, Activation::Softmax));
    Network::new(specs).expect("valid classifier stack")
}

fn approach2_encoder() -> Network {
    Network::new(vec![
        LayerSpec::dense(128, 128, Activation::Relu),
        LayerSpec::dense(128, 128, Activation::Linear),
        LayerSpec::PowerNorm,
    ])
    .expect("valid encoder stack")
}

fn approach2_decoder() -> Network {
    Network::new(vec![
        LayerSpec::dense(128, 128, Activation::Relu),
        LayerSpec::dense(128, 128, Activation::Linear),
    ])
    .expect("valid decoder stack")
}

fn toc_encoder() -> Network {
    Network::new(vec![
        LayerSpec::dense(128, 128, Activation::Relu),
        LayerSpec::dense(128, 64, Activation::Tanh),
        LayerSpec::dense(64, 2, Activation::Linear),
        LayerSpec::PowerNorm,
    ])
    .expect("valid encoder stack")
}

fn toc_decoder() -> Network {
    Network::new(vec![
        LayerSpec::dense(2, 32, Activation::Relu),
        LayerSpec::dense(32, 8, Activation::Relu),
        LayerSpec::dense(8, 2, Activation::Softmax),
    ])
    .expect("valid decoder stack")
}

/// The untrained network stack for a pipeline (parameters zeroed).
///
/// `NoChannel`/`Approach1` use the 6-hidden-layer classifier; `Approach2`
/// adds a 128-wide encoder/decoder pair around the channel; `Toc` compresses
/// to a single transmitted I/Q pair decoded by a small classifier head.
pub fn build(kind: PipelineKind) -> Vec<Network> {
    match kind {
        PipelineKind::NoChannel | PipelineKind::Approach1 => vec![classifier()],
        PipelineKind::Approach2 => {
            vec![approach2_encoder(), approach2_decoder(), classifier()]
        }
        PipelineKind::Toc => vec![toc_encoder(), toc_decoder()],
    }
}
