//! Post-hoc probability calibration for binary classifiers, prospect-theory
//! probability correction, calibration metrics, and a seeded agent study that
//! compares the five ways of reporting a prediction.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! anything touching the filesystem live in the `ptcal` companion crate.
//!
//! Module map:
//!
//! | module        | contents                                                    |
//! |---------------|-------------------------------------------------------------|
//! | [`prob`]      | `Probability`, `Label`, `ScoredSample`, `Dataset`, splitting |
//! | [`calibrate`] | Platt, isotonic (PAV), histogram binning, temperature        |
//! | [`pt`]        | probability weighting function and its approximate inverse   |
//! | [`metrics`]   | ECE/MCE/OE, NLL, Brier, accuracy/F1, Pearson, one-way ANOVA  |
//! | [`synth`]     | synthetic miscalibrated-score generator                      |
//! | [`sim`]       | decision agents and the five-arm correlation study           |
//! | [`seed`]      | PRNG construction and per-purpose seed derivation            |
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod calibrate;
mod error;
pub mod metrics;
pub mod prob;
pub mod pt;
pub mod seed;
pub mod sim;
pub mod special;
pub mod synth;

pub use error::{Error, Result};
pub use prob::{
    split_dataset, validate_probability, Dataset, Label, Probability, ScoredSample, SplitSpec,
};

/// Logistic sigmoid, evaluated without overflow for large `|z|`.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// Log-odds of `p`. Returns `±inf` at the endpoints.
#[inline]
pub fn logit(p: f64) -> f64 {
    libm::log(p) - libm::log1p(-p)
}
