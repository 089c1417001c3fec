//! Workbench for predicting in-vitro characteristics of pharmaceutical
//! formulations from small, imbalanced datasets.
//!
//! The crate covers the full experiment loop:
//!
//! - [`data`] — formulation records, CSV ingestion, categorical encoding and
//!   min-max scaling with a strict train-only fitting discipline.
//! - [`split`] — train/validation/test selection strategies: random, manual,
//!   plain maximum dissimilarity, and MD-FIS (maximum dissimilarity with a
//!   small-group filter and a representative initial set).
//! - [`metrics`] — the f2 dissolution-profile similarity factor,
//!   disintegration-time accuracy, RMSE/MAE, and report assembly.
//! - [`baselines`] — from-scratch MLR, PLSR, k-NN, random forest and
//!   single-hidden-layer network regressors behind one train/predict contract.
//! - [`deepnet`] — a from-scratch multi-layer feed-forward network (tanh
//!   hidden layers, sigmoid output) trained by full-batch gradient descent
//!   with momentum.
//! - [`synth`] — deterministic synthetic dataset generators shaped like the
//!   two supported dosage-form corpora, plus brute-force selection oracles.
//! - [`artifact`] — a self-contained serialized model format embedding the
//!   encoding and scaling tables needed at prediction time.
//!
//! Everything is deterministic given explicit seeds: identical inputs produce
//! bit-identical models, splits and reports across runs and platforms.

pub mod artifact;
pub mod baselines;
pub mod data;
pub mod deepnet;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod split;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::Matrix;

/// Version tag written into every serialized model artifact.
pub const FORMAT_VERSION: u32 = 1;

/// Derives an independent child seed from a base seed and a stream index.
///
/// SplitMix64 finalizer; used everywhere a run-level seed fans out into
/// per-component seeds (per-tree, per-target, per-selection) so that results
/// do not depend on scheduling or call order.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
