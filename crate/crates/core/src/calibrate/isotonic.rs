use alloc::vec::Vec;

use crate::{Dataset, Error, Probability, Result};

/// Non-decreasing step function stored as `(x, y)` breakpoints.
///
/// Evaluation returns the `y` of the rightmost breakpoint with `x ≤ p`, and
/// the first `y` for queries left of every breakpoint.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IsotonicModel {
    breakpoints: Vec<(Probability, Probability)>,
}

impl IsotonicModel {
    /// Checks `x` strictly increasing and `y` non-decreasing.
    pub fn from_breakpoints(breakpoints: Vec<(Probability, Probability)>) -> Result<Self> {
        for w in breakpoints.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter {
                    name: "isotonic breakpoint x not increasing at",
                    value: w[1].0.get(),
                });
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidParameter {
                    name: "isotonic breakpoint y decreasing at",
                    value: w[1].0.get(),
                });
            }
        }
        Ok(IsotonicModel { breakpoints })
    }

    pub fn breakpoints(&self) -> &[(Probability, Probability)] {
        &self.breakpoints
    }

    /// Pool-adjacent-violators on `(score, label)` sorted by score.
    ///
    /// Samples sharing a score are pooled into one weighted point first.
    pub fn fit(val: &Dataset) -> Result<Self> {
        val.require_non_empty()?;
        let mut pairs: Vec<(f64, f64)> = val
            .samples
            .iter()
            .map(|s| (s.score().get(), s.label().as_f64()))
            .collect();
        pairs.sort_by(|l, r| l.0.total_cmp(&r.0));

        let blocks = pav(tie_pool(&pairs));

        let mut breakpoints: Vec<(Probability, Probability)> = Vec::with_capacity(blocks.len());
        for blk in blocks {
            let y = Probability::saturating(blk.sum / blk.weight);
            match breakpoints.last() {
                Some(&(_, prev)) if prev == y => {}
                _ => breakpoints.push((Probability::saturating(blk.first_x), y)),
            }
        }
        Ok(IsotonicModel { breakpoints })
    }

    pub fn apply(&self, p: Probability) -> Probability {
        let k = self.breakpoints.partition_point(|bp| bp.0 <= p);
        match (k, self.breakpoints.first()) {
            (_, None) => p,
            (0, Some(first)) => first.1,
            _ => self.breakpoints[k - 1].1,
        }
    }
}

pub fn fit_isotonic(val: &Dataset) -> Result<IsotonicModel> {
    IsotonicModel::fit(val)
}

pub fn apply_isotonic(m: &IsotonicModel, p: Probability) -> Probability {
    m.apply(p)
}

#[derive(Debug, Clone, Copy)]
struct Block {
    first_x: f64,
    sum: f64,
    weight: f64,
}

impl Block {
    fn mean(&self) -> f64 {
        self.sum / self.weight
    }
}

// collapses runs of equal x (input sorted by x)
fn tie_pool(sorted: &[(f64, f64)]) -> Vec<Block> {
    let mut out: Vec<Block> = Vec::new();
    for &(x, y) in sorted {
        match out.last_mut() {
            Some(b) if b.first_x == x => {
                b.sum += y;
                b.weight += 1.0;
            }
            _ => out.push(Block {
                first_x: x,
                sum: y,
                weight: 1.0,
            }),
        }
    }
    out
}

fn pav(points: Vec<Block>) -> Vec<Block> {
    let mut stack: Vec<Block> = Vec::with_capacity(points.len());
    for p in points {
        stack.push(p);
        while stack.len() >= 2 {
            let last = stack[stack.len() - 1];
            let prev = stack[stack.len() - 2];
            if prev.mean() <= last.mean() {
                break;
            }
            stack.pop();
            let top = stack.last_mut().expect("two blocks present");
            top.sum += last.sum;
            top.weight += last.weight;
        }
    }
    stack
}
