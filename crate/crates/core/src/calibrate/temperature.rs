use crate::{sigmoid, Dataset, Error, Probability, Result};

/// `q = sigmoid(z / t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TemperatureModel {
    pub t: f64,
}

pub const TEMPERATURE_RANGE: (f64, f64) = (0.05, 20.0);
pub const TEMPERATURE_TOL: f64 = 1e-6;

impl TemperatureModel {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && t > 0.0 {
            Ok(TemperatureModel { t })
        } else {
            Err(Error::InvalidParameter {
                name: "temperature",
                value: t,
            })
        }
    }

    /// Golden-section search for the mean-NLL minimizer on `[0.05, 20]`.
    ///
    /// The NLL is convex in `1/t`, hence unimodal in `t`.
    pub fn fit(val: &Dataset) -> Result<Self> {
        val.require_non_empty()?;
        let mut data = alloc::vec::Vec::with_capacity(val.len());
        for s in &val.samples {
            data.push((s.logit().ok_or(Error::LogitsRequired)?, s.label().as_f64()));
        }
        if !val.has_both_classes() {
            return Err(Error::DegenerateLabels);
        }
        let t = golden_section(|t| mean_nll(&data, t), TEMPERATURE_RANGE, TEMPERATURE_TOL);
        TemperatureModel::new(t)
    }

    pub fn apply(&self, z: f64) -> Probability {
        Probability::saturating(sigmoid(z / self.t))
    }
}

pub fn fit_temperature(val: &Dataset) -> Result<TemperatureModel> {
    TemperatureModel::fit(val)
}

pub fn apply_temperature(m: &TemperatureModel, z: f64) -> Probability {
    m.apply(z)
}

fn mean_nll(data: &[(f64, f64)], t: f64) -> f64 {
    let sum: f64 = data
        .iter()
        .map(|&(z, y)| {
            let f = z / t;
            f.max(0.0) + libm::log1p(libm::exp(-libm::fabs(f))) - y * f
        })
        .sum();
    sum / data.len() as f64
}

fn golden_section(f: impl Fn(f64) -> f64, (mut lo, mut hi): (f64, f64), tol: f64) -> f64 {
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}
