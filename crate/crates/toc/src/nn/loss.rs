use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::{Error, Result};

/// Training losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    /// For softmax outputs paired with one-hot targets. Probabilities are
    /// clamped at 1e-12 before the log so a confident mistake stays finite.
    CategoricalCrossEntropy,
    MeanSquaredError,
}

const PROB_FLOOR: f64 = 1e-12;
const PROB_SLACK: f64 = 1e-9;

/// Batch-mean loss value and its gradient w.r.t. the prediction.
pub fn loss(kind: LossKind, prediction: &Matrix, target: &Matrix) -> Result<(f64, Matrix)> {
    if prediction.rows() != target.rows() || prediction.cols() != target.cols() {
        return Err(Error::Shape(format!(
            "prediction {}x{} vs target {}x{}",
            prediction.rows(),
            prediction.cols(),
            target.rows(),
            target.cols()
        )));
    }
    let batch = prediction.rows() as f64;
    match kind {
        LossKind::CategoricalCrossEntropy => {
            for (r, row) in prediction.iter_rows().enumerate() {
                if row.iter().any(|&p| !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&p)) {
                    return Err(Error::Domain(format!(
                        "cross-entropy prediction row {r} is not a probability row"
                    )));
                }
            }
            let mut value = 0.0;
            let mut grad = Matrix::zeros(prediction.rows(), prediction.cols());
            for r in 0..prediction.rows() {
                for ((&p, &t), g) in prediction
                    .row(r)
                    .iter()
                    .zip(target.row(r))
                    .zip(grad.row_mut(r).iter_mut())
                {
                    let p = p.max(PROB_FLOOR);
                    value -= t * p.ln();
                    *g = -t / (p * batch);
                }
            }
            Ok((value / batch, grad))
        }
        LossKind::MeanSquaredError => {
            let n = (prediction.rows() * prediction.cols()) as f64;
            let mut value = 0.0;
            let mut grad = Matrix::zeros(prediction.rows(), prediction.cols());
            for ((&p, &t), g) in prediction
                .data()
                .iter()
                .zip(target.data())
                .zip(grad.data_mut().iter_mut())
            {
                let d = p - t;
                value += d * d;
                *g = 2.0 * d / n;
            }
            Ok((value / n, grad))
        }
    }
}
