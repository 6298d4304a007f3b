//! Synthetic scored datasets with a known miscalibration.
//!
//! A true probability `r` is drawn per sample, the label is `Bernoulli(r)`,
//! and the reported score is `distortion(r)`. Because the distortion is known,
//! the ideal calibration map is known too.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::{Beta, Distribution};

use crate::pt::PtParams;
use crate::{logit, seed, sigmoid, Dataset, Error, Label, Probability, Result, ScoredSample};

/// Logits written to generated samples are clamped to `±LOGIT_CLAMP`.
pub const LOGIT_CLAMP: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Distortion {
    Identity,
    /// `score = sigmoid(logit(r) / t)`; `t < 1` is overconfident.
    Temperature {
        t: f64,
    },
    /// `score = w(r)`, the prospect-theory weighting function.
    PtWeight {
        gamma: f64,
    },
    /// `score = sigmoid(a·logit(r) + b)`.
    Logistic {
        a: f64,
        b: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "law", rename_all = "kebab-case"))]
pub enum TrueProbLaw {
    #[default]
    Uniform,
    Beta {
        alpha: f64,
        beta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistortionSpec {
    pub distortion: Distortion,
    pub law: TrueProbLaw,
    pub n: usize,
    pub seed: u64,
}

impl DistortionSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value: v })
            }
        };
        match self.distortion {
            Distortion::Identity => {}
            Distortion::Temperature { t } => positive("distortion temperature", t)?,
            Distortion::PtWeight { gamma } => {
                PtParams::new(gamma)?;
            }
            Distortion::Logistic { a, b } => {
                positive("distortion slope", a)?;
                if !b.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "distortion intercept",
                        value: b,
                    });
                }
            }
        }
        if let TrueProbLaw::Beta { alpha, beta } = self.law {
            positive("beta alpha", alpha)?;
            positive("beta beta", beta)?;
        }
        if self.n == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        let d = match self.distortion {
            Distortion::Identity => "identity".into(),
            Distortion::Temperature { t } => alloc::format!("temperature({t})"),
            Distortion::PtWeight { gamma } => alloc::format!("pt-weight({gamma})"),
            Distortion::Logistic { a, b } => alloc::format!("logistic({a},{b})"),
        };
        alloc::format!("synth:{d}:n={}:seed={}", self.n, self.seed)
    }
}

/// The reported score for true probability `r`, plus its logit when the
/// distortion works in logit space.
fn distort(distortion: &Distortion, pt: Option<&PtParams>, r: f64) -> (f64, Option<f64>) {
    let z = || logit(r).clamp(-LOGIT_CLAMP, LOGIT_CLAMP);
    match *distortion {
        Distortion::Identity => (r, None),
        Distortion::PtWeight { .. } => {
            let pt = pt.expect("validated gamma");
            (pt.weight(Probability::saturating(r)).get(), None)
        }
        Distortion::Temperature { t } => {
            let zt = (z() / t).clamp(-LOGIT_CLAMP, LOGIT_CLAMP);
            (sigmoid(zt), Some(zt))
        }
        Distortion::Logistic { a, b } => {
            let zt = (a * z() + b).clamp(-LOGIT_CLAMP, LOGIT_CLAMP);
            (sigmoid(zt), Some(zt))
        }
    }
}

/// Draws `(r, y)` and reports `(distortion(r), logit, y)`, deterministically
/// under `spec.seed`.
pub fn generate(spec: &DistortionSpec) -> Result<Dataset> {
    Ok(generate_with_truth(spec)?.0)
}

/// Like [`generate`] but also returns the true probabilities.
pub fn generate_with_truth(spec: &DistortionSpec) -> Result<(Dataset, Vec<f64>)> {
    spec.validate()?;
    let mut rng = seed::rng_from_seed(spec.seed);
    let pt = match spec.distortion {
        Distortion::PtWeight { gamma } => Some(PtParams::new(gamma)?),
        _ => None,
    };
    let beta = match spec.law {
        TrueProbLaw::Beta { alpha, beta } => {
            Some(Beta::new(alpha, beta).map_err(|_| Error::InvalidParameter {
                name: "beta law",
                value: alpha,
            })?)
        }
        TrueProbLaw::Uniform => None,
    };

    let mut samples = Vec::with_capacity(spec.n);
    let mut truth = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let r: f64 = match &beta {
            Some(b) => b.sample(&mut rng).clamp(0.0, 1.0),
            None => rng.random(),
        };
        let y = Label::from_bool(rng.random::<f64>() < r);
        let (score, z) = distort(&spec.distortion, pt.as_ref(), r);
        let score = Probability::saturating(score);
        let z = z.unwrap_or_else(|| logit(score.get()).clamp(-LOGIT_CLAMP, LOGIT_CLAMP));
        samples.push(ScoredSample::new(score, Some(z), y)?);
        truth.push(r);
    }
    Ok((Dataset::new(spec.name(), samples), truth))
}

/// Same scores and logits, labels replaced by independent fair coin flips.
pub fn shuffle_outcomes(d: &Dataset, seed: u64) -> Result<Dataset> {
    d.require_non_empty()?;
    let mut rng = seed::rng_from_seed(seed);
    let samples = d
        .samples
        .iter()
        .map(|s| s.with_label(Label::from_bool(rng.random::<bool>())))
        .collect();
    Ok(Dataset::new(
        alloc::format!("{}/random-outcomes", d.name),
        samples,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(distortion: Distortion, n: usize, seed: u64) -> DistortionSpec {
        DistortionSpec {
            distortion,
            law: TrueProbLaw::Uniform,
            n,
            seed,
        }
    }

    #[test]
    fn reproducible() {
        let s = spec(Distortion::PtWeight { gamma: 0.71 }, 500, 3);
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        let other = spec(Distortion::PtWeight { gamma: 0.71 }, 500, 4);
        assert_ne!(generate(&s).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn identity_scores_are_truth() {
        let (d, r) = generate_with_truth(&spec(Distortion::Identity, 1000, 1)).unwrap();
        for (s, t) in d.samples.iter().zip(&r) {
            assert_eq!(s.score().get(), *t);
        }
    }

    #[test]
    fn monotone_distortions_keep_order() {
        for dist in [
            Distortion::Temperature { t: 0.5 },
            Distortion::PtWeight { gamma: 0.6 },
            Distortion::Logistic { a: 1.7, b: -0.4 },
        ] {
            let (d, r) = generate_with_truth(&spec(dist, 2000, 11)).unwrap();
            let mut idx: Vec<usize> = (0..r.len()).collect();
            idx.sort_by(|&a, &b| r[a].total_cmp(&r[b]));
            for w in idx.windows(2) {
                assert!(
                    d.samples[w[0]].score() <= d.samples[w[1]].score(),
                    "{dist:?}"
                );
            }
        }
    }

    #[test]
    fn logits_are_consistent() {
        let d = generate(&DistortionSpec {
            distortion: Distortion::Temperature { t: 0.2 },
            law: TrueProbLaw::Beta {
                alpha: 0.3,
                beta: 0.3,
            },
            n: 3000,
            seed: 5,
        })
        .unwrap();
        for s in &d.samples {
            let z = s.logit().unwrap();
            assert!(z.abs() <= LOGIT_CLAMP);
            assert!((sigmoid(z) - s.score().get()).abs() <= 1e-6);
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&spec(Distortion::Temperature { t: 0.0 }, 10, 1)).is_err());
        assert!(generate(&spec(Distortion::PtWeight { gamma: 0.2 }, 10, 1)).is_err());
        assert!(generate(&spec(Distortion::Identity, 0, 1)).is_err());
        let mut s = spec(Distortion::Identity, 10, 1);
        s.law = TrueProbLaw::Beta {
            alpha: -1.0,
            beta: 1.0,
        };
        assert!(generate(&s).is_err());
    }

    #[test]
    fn shuffled_outcomes_keep_scores() {
        let d = generate(&spec(Distortion::Identity, 200, 8)).unwrap();
        let s = shuffle_outcomes(&d, 1).unwrap();
        assert_eq!(s.len(), d.len());
        for (a, b) in d.samples.iter().zip(&s.samples) {
            assert_eq!(a.score(), b.score());
            assert_eq!(a.logit(), b.logit());
        }
        assert_eq!(s, shuffle_outcomes(&d, 1).unwrap());
        assert!(shuffle_outcomes(&Dataset::default(), 1).is_err());
    }
}
