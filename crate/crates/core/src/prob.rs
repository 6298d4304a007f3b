//! Domain types shared by every module, plus deterministic dataset splitting.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;

use crate::{seed, sigmoid, Error, Result};

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    /// Rejects NaN and anything outside `[0, 1]`.
    pub fn new(x: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&x) {
            Ok(Probability(x))
        } else {
            Err(Error::ProbabilityOutOfRange(x))
        }
    }

    /// Clamps into `[0, 1]`; NaN maps to 0.
    pub fn saturating(x: f64) -> Self {
        if x.is_nan() {
            Probability(0.0)
        } else {
            Probability(x.clamp(0.0, 1.0))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

/// Same as [`Probability::new`].
pub fn validate_probability(x: f64) -> Result<Probability> {
    Probability::new(x)
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(x: f64) -> Result<Self> {
        Probability::new(x)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Binary outcome. Soft labels are not representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u8", into = "u8"))]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    #[inline]
    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        match self {
            Label::Negative => 0.0,
            Label::Positive => 1.0,
        }
    }
}

impl TryFrom<u8> for Label {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(Error::InvalidLabel(alloc::format!("{other}"))),
        }
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        match l {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }
}

/// Maximum allowed gap between `sigmoid(logit)` and `score`.
pub const LOGIT_CONSISTENCY_TOL: f64 = 1e-6;

/// One prediction: positive-class score, optional pre-sigmoid value, outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoredSample {
    score: Probability,
    logit: Option<f64>,
    label: Label,
}

impl ScoredSample {
    pub fn new(score: Probability, logit: Option<f64>, label: Label) -> Result<Self> {
        if let Some(z) = logit {
            if z.is_nan() || libm::fabs(sigmoid(z) - score.get()) > LOGIT_CONSISTENCY_TOL {
                return Err(Error::LogitMismatch {
                    score: score.get(),
                    logit: z,
                });
            }
        }
        Ok(ScoredSample {
            score,
            logit,
            label,
        })
    }

    /// Sample without a logit; cannot fail.
    pub fn scored(score: Probability, label: Label) -> Self {
        ScoredSample {
            score,
            logit: None,
            label,
        }
    }

    #[inline]
    pub fn score(&self) -> Probability {
        self.score
    }

    #[inline]
    pub fn logit(&self) -> Option<f64> {
        self.logit
    }

    #[inline]
    pub fn label(&self) -> Label {
        self.label
    }

    /// Copy with the label replaced.
    pub fn with_label(&self, label: Label) -> Self {
        ScoredSample { label, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    pub name: String,
    pub samples: Vec<ScoredSample>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, samples: Vec<ScoredSample>) -> Self {
        Dataset {
            name: name.into(),
            samples,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Errors with [`Error::EmptyDataset`] when there are no samples.
    pub fn require_non_empty(&self) -> Result<()> {
        if self.samples.is_empty() {
            Err(Error::EmptyDataset)
        } else {
            Ok(())
        }
    }

    pub fn positives(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.label.is_positive())
            .count()
    }

    /// True when both label classes are present.
    pub fn has_both_classes(&self) -> bool {
        let pos = self.positives();
        pos > 0 && pos < self.samples.len()
    }

    pub fn has_logits(&self) -> bool {
        self.samples.iter().all(|s| s.logit.is_some())
    }

    pub fn scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.score.get())
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.samples.iter().map(|s| s.label)
    }
}

/// Train / validation / test fractions and the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitSpec {
    pub train_frac: f64,
    pub val_frac: f64,
    pub test_frac: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_frac: 0.8,
            val_frac: 0.1,
            test_frac: 0.1,
            seed: 42,
        }
    }
}

impl SplitSpec {
    pub fn new(train_frac: f64, val_frac: f64, test_frac: f64, seed: u64) -> Result<Self> {
        let s = SplitSpec {
            train_frac,
            val_frac,
            test_frac,
            seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let fracs = [self.train_frac, self.val_frac, self.test_frac];
        if fracs.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::InvalidSplit("each fraction must be positive"));
        }
        if libm::fabs(fracs.iter().sum::<f64>() - 1.0) > 1e-9 {
            return Err(Error::InvalidSplit("fractions must sum to 1"));
        }
        Ok(())
    }

    /// Part sizes for `n` samples: `floor(n * frac)` for validation and test,
    /// the remainder to training.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        // the epsilon keeps e.g. 0.1 * 30 = 3.0000000000000004 and
        // 0.29 * 100 = 28.999999999999996 on the intended side of floor
        let part = |f: f64| libm::floor(n as f64 * f + 1e-9) as usize;
        let val = part(self.val_frac).min(n);
        let test = part(self.test_frac).min(n - val);
        (n - val - test, val, test)
    }
}

/// Shuffles `d` under `s.seed` and cuts it into (train, validation, test).
///
/// The three parts partition the input. Part order follows the shuffled order.
pub fn split_dataset(d: &Dataset, s: &SplitSpec) -> Result<(Dataset, Dataset, Dataset)> {
    d.require_non_empty()?;
    s.validate()?;
    let n = d.len();
    let (n_train, n_val, _) = s.sizes(n);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng_from_seed(s.seed));

    let take = |idx: &[usize], suffix: &str| {
        Dataset::new(
            alloc::format!("{}/{}", d.name, suffix),
            idx.iter().map(|&i| d.samples[i]).collect(),
        )
    };
    let (train_idx, rest) = order.split_at(n_train);
    let (val_idx, test_idx) = rest.split_at(n_val);
    Ok((
        take(train_idx, "train"),
        take(val_idx, "val"),
        take(test_idx, "test"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> Dataset {
        let samples = (0..n)
            .map(|i| {
                ScoredSample::scored(
                    Probability::new(i as f64 / n as f64).unwrap(),
                    Label::from_bool(i % 2 == 0),
                )
            })
            .collect();
        Dataset::new("toy", samples)
    }

    #[test]
    fn probability_bounds() {
        assert!(validate_probability(0.0).is_ok());
        assert!(validate_probability(1.0).is_ok());
        assert_eq!(
            validate_probability(1.2),
            Err(Error::ProbabilityOutOfRange(1.2))
        );
        assert!(validate_probability(-1e-300).is_err());
        assert!(validate_probability(f64::NAN).is_err());
    }

    #[test]
    fn logit_must_match_score() {
        let p = Probability::new(0.5).unwrap();
        assert!(ScoredSample::new(p, Some(0.0), Label::Positive).is_ok());
        assert!(ScoredSample::new(p, Some(0.1), Label::Positive).is_err());
    }

    #[test]
    fn split_sizes() {
        let s = SplitSpec::default();
        let (a, b, c) = split_dataset(&toy(10), &s).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (8, 1, 1));

        let third = 1.0 / 3.0;
        let s = SplitSpec::new(third, third, third, 7).unwrap();
        let (a, b, c) = split_dataset(&toy(3), &s).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (1, 1, 1));

        // remainder goes to train
        let (a, b, c) = split_dataset(&toy(19), &SplitSpec::default()).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (17, 1, 1));
    }

    #[test]
    fn split_is_deterministic() {
        let d = toy(10);
        let s = SplitSpec::default();
        assert_eq!(
            split_dataset(&d, &s).unwrap(),
            split_dataset(&d, &s).unwrap()
        );
    }

    #[test]
    fn split_errors() {
        let empty = Dataset::new("e", Vec::new());
        assert_eq!(
            split_dataset(&empty, &SplitSpec::default()),
            Err(Error::EmptyDataset)
        );
        assert!(matches!(
            SplitSpec::new(0.9, 0.1, 0.0, 1),
            Err(Error::InvalidSplit(_))
        ));
        assert!(matches!(
            SplitSpec::new(0.5, 0.3, 0.3, 1),
            Err(Error::InvalidSplit(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn split_partitions_input(
                n in 1usize..300,
                seed in any::<u64>(),
                a in 1u32..100, b in 1u32..100, c in 1u32..100,
            ) {
                let total = (a + b + c) as f64;
                let spec = SplitSpec {
                    train_frac: a as f64 / total,
                    val_frac: b as f64 / total,
                    test_frac: 1.0 - a as f64 / total - b as f64 / total,
                    seed,
                };
                prop_assume!(spec.validate().is_ok());
                let d = toy(n);
                let (tr, va, te) = split_dataset(&d, &spec).unwrap();
                let mut seen: Vec<f64> = tr.scores().chain(va.scores()).chain(te.scores()).collect();
                seen.sort_by(f64::total_cmp);
                let mut orig: Vec<f64> = d.scores().collect();
                orig.sort_by(f64::total_cmp);
                prop_assert_eq!(seen, orig);
            }
        }
    }
}
