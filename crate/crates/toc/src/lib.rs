//! Simulator for task-oriented wireless signal classification.
//!
//! An edge device senses modulated I/Q signals over a noisy channel and must
//! get them classified at a base station on the far side of a second noisy
//! channel. The crate provides:
//!
//! - [`nn`]: a small deterministic dense-network engine with reverse-mode
//!   gradients for both parameters and inputs, including channel layers that
//!   live inside the training graph.
//! - [`signal`]: BPSK/QPSK I/Q dataset generation with AWGN and phase-shift
//!   primitives.
//! - [`pipeline`]: the four system configurations (no-channel classifier,
//!   classify-then-communicate, communicate-then-classify, and the jointly
//!   trained task-oriented encoder/decoder) with training and evaluation.
//! - [`attack`]: backdoor (phase-trigger) poisoning and FGSM / Gaussian-noise
//!   evasion attacks against trained pipelines.
//! - [`harness`]: SNR-grid sweeps with multi-seed averaging, aggregation, and
//!   CSV/JSON/SVG output.
//!
//! Everything is deterministic given a master seed: each stochastic consumer
//! draws from its own derived RNG stream.

pub mod attack;
pub mod error;
pub mod harness;
pub mod nn;
pub mod pipeline;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
