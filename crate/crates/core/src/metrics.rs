//! Calibration and classification metrics.
//!
//! Binned metrics follow the binary max-confidence convention: the predicted
//! class is 1 when `q ≥ 0.5`, its confidence is `max(q, 1 − q)`, and bins are
//! equal-width over `[0.5, 1]` with the last bin closed.

use alloc::vec::Vec;

use crate::{special, Error, Label, Probability, Result};

/// Lower clamp applied before taking logs in [`nll`].
pub const NLL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinStats {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// `None` for an empty bin.
    pub mean_conf: Option<f64>,
    /// `None` for an empty bin.
    pub accuracy: Option<f64>,
}

impl BinStats {
    /// `|accuracy − confidence|`, or `None` for an empty bin.
    pub fn gap(&self) -> Option<f64> {
        Some(libm::fabs(self.accuracy? - self.mean_conf?))
    }
}

#[inline]
pub fn confidence(q: Probability) -> f64 {
    q.get().max(1.0 - q.get())
}

#[inline]
pub fn predicted_label(q: Probability) -> Label {
    Label::from_bool(q.get() >= 0.5)
}

/// Bins `(confidence, correct)` pairs into `bins` equal-width bins on `[0.5, 1]`.
pub fn bin_confidences(items: &[(f64, bool)], bins: usize) -> Result<Vec<BinStats>> {
    if bins == 0 {
        return Err(Error::ZeroBins);
    }
    let width = 0.5 / bins as f64;
    let mut count = alloc::vec![0usize; bins];
    let mut conf_sum = alloc::vec![0.0f64; bins];
    let mut correct = alloc::vec![0usize; bins];
    for &(c, ok) in items {
        let k = (libm::floor((c - 0.5) / width).max(0.0) as usize).min(bins - 1);
        count[k] += 1;
        conf_sum[k] += c;
        correct[k] += ok as usize;
    }
    Ok((0..bins)
        .map(|k| {
            let n = count[k];
            BinStats {
                lo: 0.5 + k as f64 * width,
                hi: if k + 1 == bins {
                    1.0
                } else {
                    0.5 + (k + 1) as f64 * width
                },
                count: n,
                mean_conf: (n > 0).then(|| conf_sum[k] / n as f64),
                accuracy: (n > 0).then(|| correct[k] as f64 / n as f64),
            }
        })
        .collect())
}

/// Bins `(q, label)` predictions under the max-confidence convention.
pub fn bin_samples(preds: &[(Probability, Label)], bins: usize) -> Result<Vec<BinStats>> {
    let items: Vec<(f64, bool)> = preds
        .iter()
        .map(|&(q, y)| (confidence(q), predicted_label(q) == y))
        .collect();
    bin_confidences(&items, bins)
}

/// Reliability-diagram data; the same bins that [`ece`] consumes.
pub fn reliability_data(preds: &[(Probability, Label)], bins: usize) -> Result<Vec<BinStats>> {
    bin_samples(preds, bins)
}

fn total(bins: &[BinStats]) -> Result<f64> {
    let n: usize = bins.iter().map(|b| b.count).sum();
    if n == 0 {
        Err(Error::EmptyDataset)
    } else {
        Ok(n as f64)
    }
}

/// Expected calibration error: count-weighted mean of per-bin gaps.
pub fn ece(bins: &[BinStats]) -> Result<f64> {
    let n = total(bins)?;
    Ok(bins
        .iter()
        .filter_map(|b| b.gap().map(|g| b.count as f64 / n * g))
        .sum())
}

/// Maximum calibration error over populated bins.
pub fn mce(bins: &[BinStats]) -> Result<f64> {
    bins.iter()
        .filter_map(BinStats::gap)
        .reduce(f64::max)
        .ok_or(Error::AllBinsEmpty)
}

/// Overconfidence error: `Σ (|B|/n)·conf·max(conf − acc, 0)`.
pub fn oe(bins: &[BinStats]) -> Result<f64> {
    let n = total(bins)?;
    Ok(bins
        .iter()
        .filter_map(|b| {
            let (c, a) = (b.mean_conf?, b.accuracy?);
            Some(b.count as f64 / n * c * (c - a).max(0.0))
        })
        .sum())
}

/// Mean negative log of the confidence assigned to the true class.
///
/// Inputs are clamped to `[1e-12, 1]` first.
pub fn nll(true_class_conf: &[f64]) -> Result<f64> {
    if true_class_conf.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let sum: f64 = true_class_conf
        .iter()
        .map(|&p| -libm::log(p.clamp(NLL_EPS, 1.0)))
        .sum();
    Ok(sum / true_class_conf.len() as f64)
}

/// [`nll`] on `(q, label)` pairs, using `q` for positives and `1 − q` otherwise.
pub fn nll_binary(preds: &[(Probability, Label)]) -> Result<f64> {
    let conf: Vec<f64> = preds
        .iter()
        .map(|&(q, y)| {
            if y.is_positive() {
                q.get()
            } else {
                1.0 - q.get()
            }
        })
        .collect();
    nll(&conf)
}

/// Mean of `(q − y)²`.
///
/// This is the single-probability binary form; the two-class sum form is
/// exactly twice this value.
pub fn brier(preds: &[(Probability, Label)]) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let sum: f64 = preds
        .iter()
        .map(|&(q, y)| {
            let d = q.get() - y.as_f64();
            d * d
        })
        .sum();
    Ok(sum / preds.len() as f64)
}

/// Accuracy and positive-class F1 for predictions `q ≥ threshold`.
///
/// F1 is 1 when there are neither predicted nor actual positives, and 0 for
/// any other zero denominator.
pub fn accuracy_f1(preds: &[(Probability, Label)], threshold: f64) -> Result<(f64, f64)> {
    if preds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (mut tp, mut fp, mut fneg, mut correct) = (0usize, 0usize, 0usize, 0usize);
    for &(q, y) in preds {
        let yhat = q.get() >= threshold;
        let pos = y.is_positive();
        correct += (yhat == pos) as usize;
        match (yhat, pos) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => {}
        }
    }
    let acc = correct as f64 / preds.len() as f64;
    let f1 = if tp + fp == 0 && tp + fneg == 0 {
        1.0
    } else if tp == 0 {
        0.0
    } else {
        // 2PR/(P+R) simplifies to 2tp / (2tp + fp + fn)
        2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
    };
    Ok((acc, f1))
}

/// Every metric reported by `evaluate`/`compare`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricReport {
    pub n: usize,
    pub bins_m: usize,
    pub accuracy: f64,
    pub f1: f64,
    pub ece: f64,
    pub mce: f64,
    pub oe: f64,
    pub nll: f64,
    pub brier: f64,
    pub bins: Vec<BinStats>,
}

impl MetricReport {
    pub fn compute(preds: &[(Probability, Label)], bins_m: usize) -> Result<Self> {
        let bins = bin_samples(preds, bins_m)?;
        let (accuracy, f1) = accuracy_f1(preds, 0.5)?;
        Ok(MetricReport {
            n: preds.len(),
            bins_m,
            accuracy,
            f1,
            ece: ece(&bins)?,
            mce: mce(&bins)?,
            oe: oe(&bins)?,
            nll: nll_binary(preds)?,
            brier: brier(preds)?,
            bins,
        })
    }
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            available: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (libm::sqrt(sxx) * libm::sqrt(syy))).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnovaResult {
    pub f_stat: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p_value: f64,
}

/// Classic one-way ANOVA, `F = MSB / MSW`, with the p-value from the F survival
/// function.
pub fn anova_oneway<G: AsRef<[f64]>>(groups: &[G]) -> Result<AnovaResult> {
    if groups.len() < 2 {
        return Err(Error::Anova("at least two groups are required"));
    }
    if groups.iter().any(|g| g.as_ref().len() < 2) {
        return Err(Error::Anova("each group needs at least two values"));
    }
    let n: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    let k = groups.len();
    let grand = groups.iter().flat_map(|g| g.as_ref()).sum::<f64>() / n as f64;
    let (mut ssb, mut ssw) = (0.0, 0.0);
    for g in groups {
        let g = g.as_ref();
        let m = g.iter().sum::<f64>() / g.len() as f64;
        ssb += g.len() as f64 * (m - grand) * (m - grand);
        ssw += g.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    }
    if ssw.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) {
        return Err(Error::Anova("zero within-group variance"));
    }
    let (df_between, df_within) = (k - 1, n - k);
    let f_stat = (ssb / df_between as f64) / (ssw / df_within as f64);
    let p_value = special::f_survival(f_stat, df_between as f64, df_within as f64)?;
    Ok(AnovaResult {
        f_stat,
        df_between,
        df_within,
        p_value,
    })
}
