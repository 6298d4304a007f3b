//! Prospect-theory probability weighting.
//!
//! People perceive a stated probability `p` as
//!
//! ```text
//! w(p) = p^γ / (p^γ + (1-p)^γ)^(1/γ)
//! ```
//!
//! which overweights small and underweights large probabilities. Reporting
//! `w⁻¹(q)` instead of a calibrated `q` makes the perceived value land back on
//! `q`. There is no closed form for `w⁻¹`, so the correction uses
//!
//! ```text
//! w⁻¹(p) ≈ p^(1/γ) / (p^(1/γ) + (1-p)^(1/γ))^(1/γ)
//! ```
//!
//! `w` is monotone only for γ above ≈ 0.279, which is the lower bound
//! enforced by [`PtParams`].

use alloc::vec::Vec;

use crate::{Error, Probability, Result};

/// Exclusive lower bound on γ for a monotone weighting function.
pub const MONOTONE_GAMMA_BOUND: f64 = 0.279;

/// Fitted value for U.S. respondents, used as the pipeline default.
pub const DEFAULT_GAMMA: f64 = 0.71;

/// Curvature parameter γ, validated to `(0.279, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct PtParams {
    gamma: f64,
}

impl PtParams {
    pub fn new(gamma: f64) -> Result<Self> {
        validate_gamma(gamma)
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Perceived probability for a reported `p`.
    pub fn weight(&self, p: Probability) -> Probability {
        Probability::saturating(power_ratio(p.get(), self.gamma, 1.0 / self.gamma))
    }

    /// Probability to report so that it is perceived as roughly `p`.
    ///
    /// The approximation exceeds 1 near the top of the range when γ is below
    /// about 0.83 (for γ = 0.71, from p ≈ 0.93); such values saturate to 1.
    pub fn inverse(&self, p: Probability) -> Probability {
        let e = 1.0 / self.gamma;
        Probability::saturating(power_ratio(p.get(), e, e))
    }

    pub fn roundtrip_report(&self) -> RoundTripReport {
        roundtrip_report(self)
    }
}

impl Default for PtParams {
    fn default() -> Self {
        PtParams {
            gamma: DEFAULT_GAMMA,
        }
    }
}

impl TryFrom<f64> for PtParams {
    type Error = Error;

    fn try_from(g: f64) -> Result<Self> {
        validate_gamma(g)
    }
}

impl From<PtParams> for f64 {
    fn from(p: PtParams) -> f64 {
        p.gamma
    }
}

pub fn validate_gamma(g: f64) -> Result<PtParams> {
    if g.is_nan() || g <= MONOTONE_GAMMA_BOUND {
        return Err(Error::GammaOutOfRange {
            gamma: g,
            bound: "gamma > 0.279",
        });
    }
    if g > 1.0 {
        return Err(Error::GammaOutOfRange {
            gamma: g,
            bound: "gamma <= 1",
        });
    }
    Ok(PtParams { gamma: g })
}

pub fn pt_weight(p: Probability, params: &PtParams) -> Probability {
    params.weight(p)
}

pub fn pt_inverse(p: Probability, params: &PtParams) -> Probability {
    params.inverse(p)
}

// `p^inner / (p^inner + (1-p)^inner)^outer`, endpoints pinned to 0 and 1.
fn power_ratio(p: f64, inner: f64, outer: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let a = libm::pow(p, inner);
    let b = libm::pow(1.0 - p, inner);
    a / libm::pow(a + b, outer)
}

/// Round-trip accuracy of the approximate inverse over `P ∈ {0, 1, …, 100}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundTripReport {
    pub gamma: f64,
    /// Mean of `e_P = |P − 100·w⁻¹(w(P/100))|`, in percentage points.
    pub mae_percent: f64,
    /// Mean of `e_P²`, in squared percentage points.
    pub mse_percent2: f64,
    /// Mean of `(e_P / 100)²`, in squared probability units.
    pub mse_probability2: f64,
    /// Largest `e_P`, in percentage points.
    pub max_error_percent: f64,
    /// `e_0 … e_100`.
    pub per_point_errors: Vec<f64>,
}

pub const ROUNDTRIP_GRID_POINTS: usize = 101;

pub fn roundtrip_report(params: &PtParams) -> RoundTripReport {
    let errors: Vec<f64> = (0..ROUNDTRIP_GRID_POINTS)
        .map(|pct| {
            let p = Probability::saturating(pct as f64 / 100.0);
            let back = params.inverse(params.weight(p)).get();
            libm::fabs(pct as f64 - 100.0 * back)
        })
        .collect();
    let n = errors.len() as f64;
    let mae = errors.iter().sum::<f64>() / n;
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / n;
    RoundTripReport {
        gamma: params.gamma,
        mae_percent: mae,
        mse_percent2: mse,
        mse_probability2: mse / 1e4,
        max_error_percent: errors.iter().copied().fold(0.0, f64::max),
        per_point_errors: errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> Probability {
        Probability::new(x).unwrap()
    }

    #[test]
    fn gamma_validation() {
        assert!(validate_gamma(0.71).is_ok());
        assert!(validate_gamma(1.0).is_ok());
        assert!(matches!(
            validate_gamma(0.2),
            Err(Error::GammaOutOfRange {
                bound: "gamma > 0.279",
                ..
            })
        ));
        assert!(validate_gamma(0.279).is_err());
        assert!(matches!(
            validate_gamma(1.01),
            Err(Error::GammaOutOfRange {
                bound: "gamma <= 1",
                ..
            })
        ));
        assert!(validate_gamma(f64::NAN).is_err());
    }

    #[test]
    fn fixed_points() {
        for g in [0.3, 0.5, 0.71, 1.0] {
            let pt = PtParams::new(g).unwrap();
            assert_eq!(pt.weight(Probability::ZERO).get(), 0.0);
            assert_eq!(pt.weight(Probability::ONE).get(), 1.0);
            assert_eq!(pt.inverse(Probability::ZERO).get(), 0.0);
            assert_eq!(pt.inverse(Probability::ONE).get(), 1.0);
        }
    }

    #[test]
    fn identity_at_gamma_one() {
        let pt = PtParams::new(1.0).unwrap();
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert!((pt.weight(p(x)).get() - x).abs() <= 1e-12);
            assert!((pt.inverse(p(x)).get() - x).abs() <= 1e-12);
        }
    }

    #[test]
    fn reference_values() {
        let pt = PtParams::default();
        // 0.5^0.71 / (2 * 0.5^0.71)^(1/0.71), evaluated by hand in f64
        let w_half = 0.460_588_180_863_837_2;
        assert!((pt.weight(p(0.5)).get() - w_half).abs() < 1e-12);
        assert!((pt.inverse(p(0.4605)).get() - 0.498_603_4).abs() < 1e-6);
        assert!((pt.inverse(pt.weight(p(0.5))).get() - 0.498_743_5).abs() < 1e-6);
    }

    #[test]
    fn inverse_saturates_near_one_at_default_gamma() {
        let pt = PtParams::default();
        assert!(pt.inverse(p(0.9)).get() < 1.0);
        assert_eq!(pt.inverse(p(0.95)).get(), 1.0);
        // below the overshoot region the map is increasing
        let mut prev = -1.0;
        for i in 0..=900 {
            let v = pt.inverse(p(i as f64 / 1000.0)).get();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn roundtrip_identity_and_endpoints() {
        let r = PtParams::new(1.0).unwrap().roundtrip_report();
        assert!(r.mae_percent < 1e-10 && r.mse_percent2 < 1e-18);
        for g in [0.28, 0.4, 0.71, 0.9] {
            let r = PtParams::new(g).unwrap().roundtrip_report();
            assert_eq!(r.per_point_errors.len(), 101);
            assert_eq!(r.per_point_errors[0], 0.0);
            assert_eq!(r.per_point_errors[100], 0.0);
            assert!(r.mse_percent2 >= r.mae_percent * r.mae_percent);
        }
    }

    #[test]
    fn roundtrip_at_default_gamma() {
        let r = PtParams::default().roundtrip_report();
        assert!((r.mae_percent - 0.963).abs() <= 0.05, "{}", r.mae_percent);
        // worst grid point sits at P = 92
        let worst = r
            .per_point_errors
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert_eq!(worst.0, 92);
        assert!(r.max_error_percent / 100.0 <= 0.035);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn weight_is_increasing(g in 0.2795f64..=1.0) {
                let pt = PtParams::new(g).unwrap();
                let mut prev = -1.0;
                for i in 0..=2000 {
                    let x = p(i as f64 / 2000.0);
                    let w = pt.weight(x).get();
                    prop_assert!((0.0..=1.0).contains(&w));
                    prop_assert!(w > prev, "weight not increasing at {}", x);
                    prev = w;
                }
            }

            // overshoot near p = 1 breaks monotonicity below γ ≈ 0.83
            #[test]
            fn inverse_is_increasing_for_mild_gamma(g in 0.84f64..=1.0) {
                let pt = PtParams::new(g).unwrap();
                let mut prev = -1.0;
                for i in 0..=2000 {
                    let v = pt.inverse(p(i as f64 / 2000.0)).get();
                    prop_assert!(v > prev);
                    prev = v;
                }
            }

            #[test]
            fn inverse_is_bounded(g in 0.2795f64..=1.0, x in 0.0f64..=1.0) {
                let v = PtParams::new(g).unwrap().inverse(p(x)).get();
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
