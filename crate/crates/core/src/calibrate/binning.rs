use alloc::vec::Vec;

use crate::{Dataset, Error, Probability, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BinStrategy {
    #[default]
    EqualWidth,
    EqualFrequency,
}

impl BinStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            BinStrategy::EqualWidth => "equal-width",
            BinStrategy::EqualFrequency => "equal-frequency",
        }
    }
}

impl core::fmt::Display for BinStrategy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for BinStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [BinStrategy::EqualWidth, BinStrategy::EqualFrequency]
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::UnknownName(s.into()))
    }
}

pub const DEFAULT_BINS: usize = 15;

/// Piecewise-constant calibration map.
///
/// Bin `k` covers `[edges[k], edges[k+1])`; the last bin is closed on the
/// right. `values[k]` is the positive rate observed in bin `k` at fit time.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinningModel {
    edges: Vec<f64>,
    values: Vec<Probability>,
    strategy: BinStrategy,
}

impl BinningModel {
    pub fn from_parts(
        edges: Vec<f64>,
        values: Vec<Probability>,
        strategy: BinStrategy,
    ) -> Result<Self> {
        let m = BinningModel {
            edges,
            values,
            strategy,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |value| {
            Err(Error::InvalidParameter {
                name: "binning edges",
                value,
            })
        };
        if self.values.is_empty() {
            return Err(Error::UnfittedCalibrator);
        }
        if self.edges.len() != self.values.len() + 1 {
            return bad(self.edges.len() as f64);
        }
        if self.edges[0] != 0.0 || self.edges[self.edges.len() - 1] != 1.0 {
            return bad(self.edges[0]);
        }
        if let Some(w) = self.edges.windows(2).find(|w| w[1] <= w[0]) {
            return bad(w[1]);
        }
        Ok(())
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn values(&self) -> &[Probability] {
        &self.values
    }

    pub fn strategy(&self) -> BinStrategy {
        self.strategy
    }

    pub fn bins(&self) -> usize {
        self.values.len()
    }

    /// Fits on raw validation scores.
    pub fn fit(val: &Dataset, bins: usize, strategy: BinStrategy) -> Result<Self> {
        let pairs: Vec<(f64, bool)> = val
            .samples
            .iter()
            .map(|s| (s.score().get(), s.label().is_positive()))
            .collect();
        Self::fit_pairs(&pairs, bins, strategy)
    }

    /// Fits on arbitrary `(score, positive)` pairs; used by the Platt composite.
    pub(crate) fn fit_pairs(
        pairs: &[(f64, bool)],
        bins: usize,
        strategy: BinStrategy,
    ) -> Result<Self> {
        if bins == 0 {
            return Err(Error::ZeroBins);
        }
        if pairs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let edges = match strategy {
            BinStrategy::EqualWidth => (0..=bins).map(|i| i as f64 / bins as f64).collect(),
            BinStrategy::EqualFrequency => quantile_edges(pairs, bins),
        };
        let m = edges.len() - 1;
        let mut pos = alloc::vec![0usize; m];
        let mut cnt = alloc::vec![0usize; m];
        for &(s, y) in pairs {
            let k = bin_index(&edges, s);
            cnt[k] += 1;
            pos[k] += y as usize;
        }
        let mut values: Vec<Option<f64>> = cnt
            .iter()
            .zip(&pos)
            .map(|(&c, &p)| (c > 0).then(|| p as f64 / c as f64))
            .collect();
        // empty bins: nearest populated bin to the left, else to the right
        let mut carry = None;
        for v in values.iter_mut() {
            match v {
                Some(x) => carry = Some(*x),
                None => *v = carry,
            }
        }
        let mut carry = None;
        for v in values.iter_mut().rev() {
            match v {
                Some(x) => carry = Some(*x),
                None => *v = carry,
            }
        }
        let values = values
            .into_iter()
            .map(|v| Probability::saturating(v.expect("at least one populated bin")))
            .collect();
        Ok(BinningModel {
            edges,
            values,
            strategy,
        })
    }

    pub fn bin_of(&self, p: Probability) -> usize {
        bin_index(&self.edges, p.get())
    }

    pub fn apply(&self, p: Probability) -> Probability {
        self.values[self.bin_of(p)]
    }
}

pub fn fit_binning(val: &Dataset, bins: usize, strategy: BinStrategy) -> Result<BinningModel> {
    BinningModel::fit(val, bins, strategy)
}

pub fn apply_binning(m: &BinningModel, p: Probability) -> Probability {
    m.apply(p)
}

fn bin_index(edges: &[f64], x: f64) -> usize {
    let last = edges.len() - 2;
    edges
        .partition_point(|&e| e <= x)
        .saturating_sub(1)
        .min(last)
}

// empirical quantiles at ranks floor(k·n/M), duplicates merged
fn quantile_edges(pairs: &[(f64, bool)], bins: usize) -> Vec<f64> {
    let mut scores: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    scores.sort_by(f64::total_cmp);
    let n = scores.len();
    let mut edges = alloc::vec![0.0];
    for k in 1..bins {
        let q = scores[(k * n / bins).min(n - 1)];
        if q > *edges.last().unwrap() && q < 1.0 {
            edges.push(q);
        }
    }
    edges.push(1.0);
    edges
}
