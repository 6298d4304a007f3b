use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("probability out of range: {0}")]
    ProbabilityOutOfRange(f64),

    #[error("logit {logit} inconsistent with score {score}")]
    LogitMismatch { score: f64, logit: f64 },

    #[error("label must be 0 or 1, got {0}")]
    InvalidLabel(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid split: {0}")]
    InvalidSplit(&'static str),

    #[error("degenerate labels: both classes are required")]
    DegenerateLabels,

    #[error("platt fit did not converge after {iterations} iterations (a={a}, b={b}, gradient norm {grad_norm:e})")]
    NoConvergence {
        a: f64,
        b: f64,
        grad_norm: f64,
        iterations: usize,
    },

    #[error("logits required")]
    LogitsRequired,

    #[error("bin count must be at least 1")]
    ZeroBins,

    #[error("gamma out of monotone range: {gamma} violates {bound}")]
    GammaOutOfRange { gamma: f64, bound: &'static str },

    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("undefined correlation: an input has zero variance")]
    UndefinedCorrelation,

    #[error("all bins are empty")]
    AllBinsEmpty,

    #[error("anova: {0}")]
    Anova(&'static str),

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("calibrator is not fitted")]
    UnfittedCalibrator,

    #[error("too few samples: need {needed}, have {available}")]
    TooFewSamples { needed: usize, available: usize },
}
