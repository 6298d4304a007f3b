//! Post-hoc calibration of binary classifier scores.
//!
//! Each method is fitted on a held-out validation set and then applied to new
//! scores:
//!
//! * [`PlattModel`]: logistic remap `sigmoid(a·p + b)`.
//! * [`IsotonicModel`]: least-squares non-decreasing step function (PAV).
//! * [`BinningModel`]: per-bin empirical positive rate.
//! * [`TemperatureModel`]: `sigmoid(z / t)` on the pre-sigmoid value.
//! * [`BinningWithPlatt`]: Platt first, then histogram binning of its output.
//!
//! [`CalibratorModel`] wraps all of them (plus a pass-through) behind one
//! `apply`.

mod binning;
mod isotonic;
mod platt;
mod temperature;

pub use binning::{apply_binning, fit_binning, BinStrategy, BinningModel, DEFAULT_BINS};
pub use isotonic::{apply_isotonic, fit_isotonic, IsotonicModel};
pub use platt::{apply_platt, fit_platt, PlattModel, PLATT_GRAD_TOL, PLATT_MAX_ITER};
pub use temperature::{
    apply_temperature, fit_temperature, TemperatureModel, TEMPERATURE_RANGE, TEMPERATURE_TOL,
};

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Dataset, Error, Probability, Result, ScoredSample};

/// Platt scaling followed by histogram binning of the Platt output.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinningWithPlatt {
    pub platt: PlattModel,
    pub binning: BinningModel,
}

impl BinningWithPlatt {
    pub fn fit(val: &Dataset, bins: usize, strategy: BinStrategy) -> Result<Self> {
        let platt = PlattModel::fit(val)?;
        Self::fit_with_platt(platt, val, bins, strategy)
    }

    /// Second stage only, with the Platt stage supplied by the caller.
    pub fn fit_with_platt(
        platt: PlattModel,
        val: &Dataset,
        bins: usize,
        strategy: BinStrategy,
    ) -> Result<Self> {
        val.require_non_empty()?;
        let mapped: Vec<(f64, bool)> = val
            .samples
            .iter()
            .map(|s| (platt.apply(s.score()).get(), s.label().is_positive()))
            .collect();
        let binning = BinningModel::fit_pairs(&mapped, bins, strategy)?;
        Ok(BinningWithPlatt { platt, binning })
    }

    pub fn apply(&self, p: Probability) -> Probability {
        self.binning.apply(self.platt.apply(p))
    }
}

pub fn fit_binning_with_platt(
    val: &Dataset,
    bins: usize,
    strategy: BinStrategy,
) -> Result<CalibratorModel> {
    BinningWithPlatt::fit(val, bins, strategy).map(CalibratorModel::BinningWithPlatt)
}

/// Any fitted calibrator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum CalibratorModel {
    /// Pass-through.
    Identity,
    Platt(PlattModel),
    Isotonic(IsotonicModel),
    Binning(BinningModel),
    Temperature(TemperatureModel),
    BinningWithPlatt(BinningWithPlatt),
}

impl CalibratorModel {
    pub fn method(&self) -> Method {
        match self {
            CalibratorModel::Identity => Method::Identity,
            CalibratorModel::Platt(_) => Method::Platt,
            CalibratorModel::Isotonic(_) => Method::Isotonic,
            CalibratorModel::Binning(_) => Method::Binning,
            CalibratorModel::Temperature(_) => Method::Temperature,
            CalibratorModel::BinningWithPlatt(_) => Method::BinningWithPlatt,
        }
    }

    /// Structural checks for models that did not come out of `fit`, e.g.
    /// deserialized ones.
    pub fn validate(&self) -> Result<()> {
        match self {
            CalibratorModel::Identity => Ok(()),
            CalibratorModel::Platt(m) => PlattModel::new(m.a, m.b).map(|_| ()),
            CalibratorModel::Isotonic(m) => {
                if m.breakpoints().is_empty() {
                    return Err(Error::UnfittedCalibrator);
                }
                IsotonicModel::from_breakpoints(m.breakpoints().to_vec()).map(|_| ())
            }
            CalibratorModel::Binning(m) => m.validate(),
            CalibratorModel::Temperature(m) => TemperatureModel::new(m.t).map(|_| ()),
            CalibratorModel::BinningWithPlatt(m) => {
                PlattModel::new(m.platt.a, m.platt.b)?;
                m.binning.validate()
            }
        }
    }

    pub fn apply(&self, s: &ScoredSample) -> Result<Probability> {
        let p = s.score();
        Ok(match self {
            CalibratorModel::Identity => p,
            CalibratorModel::Platt(m) => m.apply(p),
            CalibratorModel::Isotonic(m) => m.apply(p),
            CalibratorModel::Binning(m) => m.apply(p),
            CalibratorModel::Temperature(m) => m.apply(s.logit().ok_or(Error::LogitsRequired)?),
            CalibratorModel::BinningWithPlatt(m) => m.apply(p),
        })
    }

    /// Calibrated copy of `d`. Labels are kept; logits are dropped since they
    /// no longer match the new scores.
    pub fn apply_dataset(&self, d: &Dataset) -> Result<Dataset> {
        let samples = d
            .samples
            .iter()
            .map(|s| Ok(ScoredSample::scored(self.apply(s)?, s.label())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset::new(d.name.clone(), samples))
    }
}

pub fn apply_calibrator(m: &CalibratorModel, s: &ScoredSample) -> Result<Probability> {
    m.apply(s)
}

/// Calibration method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    Identity,
    Platt,
    Isotonic,
    Binning,
    Temperature,
    BinningWithPlatt,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Identity,
        Method::Platt,
        Method::Isotonic,
        Method::Binning,
        Method::Temperature,
        Method::BinningWithPlatt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Identity => "identity",
            Method::Platt => "platt",
            Method::Isotonic => "isotonic",
            Method::Binning => "binning",
            Method::Temperature => "temperature",
            Method::BinningWithPlatt => "binning-with-platt",
        }
    }

    pub fn fit(self, val: &Dataset, bins: usize, strategy: BinStrategy) -> Result<CalibratorModel> {
        Ok(match self {
            Method::Identity => CalibratorModel::Identity,
            Method::Platt => CalibratorModel::Platt(PlattModel::fit(val)?),
            Method::Isotonic => CalibratorModel::Isotonic(IsotonicModel::fit(val)?),
            Method::Binning => CalibratorModel::Binning(BinningModel::fit(val, bins, strategy)?),
            Method::Temperature => CalibratorModel::Temperature(TemperatureModel::fit(val)?),
            Method::BinningWithPlatt => fit_binning_with_platt(val, bins, strategy)?,
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownName(s.into()))
    }
}
