//! Simulated decision makers reading probabilistic predictions.
//!
//! An agent perceives a reported probability through the weighting function,
//! blends it with a prior according to how much it currently relies on the
//! system, adds decision noise, and answers on a 1–5 Likert scale. After each
//! scenario it sees the outcome and moves its reliance toward the observed
//! prediction–outcome agreement.
//!
//! A study shows every agent `scenarios_per_agent` predictions from one arm and
//! scores the agent by the Pearson correlation between the probabilities it was
//! shown and its decisions. Agents use the same derived seed in every arm, so
//! arms are compared on common random numbers.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::index;
use rand_distr::{Distribution, Normal};

use crate::calibrate::{BinStrategy, CalibratorModel, Method, DEFAULT_BINS};
use crate::metrics::{anova_oneway, pearson, AnovaResult};
use crate::prob::split_dataset;
use crate::pt::{PtParams, DEFAULT_GAMMA};
use crate::seed::{self, derive_seed, purpose};
use crate::synth::{self, Distortion, DistortionSpec, TrueProbLaw};
use crate::{Dataset, Error, Label, Probability, Result, SplitSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgentSpec {
    pub gamma_agent: PtParams,
    pub prior: Probability,
    pub reliance_init: f64,
    pub learning_rate: f64,
    pub decision_noise_sd: f64,
}

impl Default for AgentSpec {
    fn default() -> Self {
        AgentSpec {
            gamma_agent: PtParams::default(),
            prior: Probability::HALF,
            reliance_init: 0.5,
            learning_rate: 0.6,
            decision_noise_sd: 0.05,
        }
    }
}

impl AgentSpec {
    pub fn validate(&self) -> Result<()> {
        let unit = |name, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value: v })
            }
        };
        unit("reliance_init", self.reliance_init)?;
        unit("learning_rate", self.learning_rate)?;
        if !(self.decision_noise_sd >= 0.0 && self.decision_noise_sd.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "decision_noise_sd",
                value: self.decision_noise_sd,
            });
        }
        Ok(())
    }

    pub fn initial_state(&self) -> AgentState {
        AgentState {
            reliance: self.reliance_init,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub reliance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub likert: u8,
    pub perceived: Probability,
    pub blended: f64,
}

/// Maps a probability in `[0, 1]` to `1..=5` by uniform rounding.
pub fn likert(p: f64) -> u8 {
    1 + libm::round(4.0 * p.clamp(0.0, 1.0)) as u8
}

/// One decision. `noise` is a standard-normal draw scaled by the agent's
/// noise level.
pub fn agent_decide(
    spec: &AgentSpec,
    state: &AgentState,
    reported: Probability,
    noise: f64,
) -> Decision {
    let perceived = spec.gamma_agent.weight(reported);
    let blended = state.reliance * perceived.get() + (1.0 - state.reliance) * spec.prior.get();
    let noisy = (blended + spec.decision_noise_sd * noise).clamp(0.0, 1.0);
    Decision {
        likert: likert(noisy),
        perceived,
        blended,
    }
}

/// Moves reliance toward `1 − |w(reported) − outcome|`.
pub fn agent_update(
    spec: &AgentSpec,
    state: &AgentState,
    reported: Probability,
    outcome: Label,
) -> AgentState {
    let agreement = 1.0 - libm::fabs(spec.gamma_agent.weight(reported).get() - outcome.as_f64());
    let r = (1.0 - spec.learning_rate) * state.reliance + spec.learning_rate * agreement;
    AgentState {
        reliance: r.clamp(0.0, 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ArmName {
    Uncalibrated,
    Calibrated,
    PtCalibrated,
    PtUncalibrated,
    Random,
}

impl ArmName {
    pub const ALL: [ArmName; 5] = [
        ArmName::Uncalibrated,
        ArmName::Calibrated,
        ArmName::PtCalibrated,
        ArmName::PtUncalibrated,
        ArmName::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArmName::Uncalibrated => "uncalibrated",
            ArmName::Calibrated => "calibrated",
            ArmName::PtCalibrated => "pt_calibrated",
            ArmName::PtUncalibrated => "pt_uncalibrated",
            ArmName::Random => "random",
        }
    }
}

impl fmt::Display for ArmName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What one method shows: a probability and the realised outcome per scenario.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Arm {
    pub name: ArmName,
    pub reported: Vec<Probability>,
    pub outcomes: Vec<Label>,
}

impl Arm {
    pub fn len(&self) -> usize {
        self.reported.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reported.is_empty()
    }
}

/// The five arms over the same samples, in [`ArmName::ALL`] order.
///
/// The random arm shows the PT-calibrated probabilities with fair-coin
/// outcomes drawn under `seed`.
pub fn build_arms(
    base: &Dataset,
    calibrator: &CalibratorModel,
    pt: &PtParams,
    seed: u64,
) -> Result<Vec<Arm>> {
    base.require_non_empty()?;
    calibrator.validate()?;
    let raw: Vec<Probability> = base.samples.iter().map(|s| s.score()).collect();
    let calibrated = base
        .samples
        .iter()
        .map(|s| calibrator.apply(s))
        .collect::<Result<Vec<_>>>()?;
    let pt_cal: Vec<Probability> = calibrated.iter().map(|&p| pt.inverse(p)).collect();
    let pt_raw: Vec<Probability> = raw.iter().map(|&p| pt.inverse(p)).collect();
    let outcomes: Vec<Label> = base.labels().collect();
    let random_outcomes: Vec<Label> = synth::shuffle_outcomes(base, seed)?.labels().collect();

    Ok(alloc::vec![
        Arm {
            name: ArmName::Uncalibrated,
            reported: raw,
            outcomes: outcomes.clone(),
        },
        Arm {
            name: ArmName::Calibrated,
            reported: calibrated,
            outcomes: outcomes.clone(),
        },
        Arm {
            name: ArmName::PtCalibrated,
            reported: pt_cal.clone(),
            outcomes: outcomes.clone(),
        },
        Arm {
            name: ArmName::PtUncalibrated,
            reported: pt_raw,
            outcomes,
        },
        Arm {
            name: ArmName::Random,
            reported: pt_cal,
            outcomes: random_outcomes,
        },
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StudyConfig {
    pub agent: AgentSpec,
    pub scenarios_per_agent: usize,
    pub agents_per_arm: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            agent: AgentSpec::default(),
            scenarios_per_agent: 20,
            agents_per_arm: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArmResult {
    pub arm: ArmName,
    /// Correlations of agents whose decisions varied.
    pub per_agent_corr: Vec<f64>,
    /// Mean of `per_agent_corr`; `None` if every agent was excluded.
    pub mean_corr: Option<f64>,
    /// Agents dropped because all their decisions were identical.
    pub excluded: usize,
    /// Likert decisions, one row per agent (excluded agents included).
    pub decisions: Vec<Vec<u8>>,
}

/// Runs every agent of every arm.
pub fn run_study(arms: &[Arm], cfg: &StudyConfig, seed: u64) -> Result<Vec<ArmResult>> {
    cfg.agent.validate()?;
    if cfg.scenarios_per_agent < 2 {
        return Err(Error::InvalidParameter {
            name: "scenarios_per_agent",
            value: cfg.scenarios_per_agent as f64,
        });
    }
    for arm in arms {
        if arm.reported.len() != arm.outcomes.len() {
            return Err(Error::LengthMismatch {
                left: arm.reported.len(),
                right: arm.outcomes.len(),
            });
        }
        if arm.len() < cfg.scenarios_per_agent {
            return Err(Error::TooFewSamples {
                needed: cfg.scenarios_per_agent,
                available: arm.len(),
            });
        }
    }
    arms.iter().map(|arm| run_arm(arm, cfg, seed)).collect()
}

fn run_arm(arm: &Arm, cfg: &StudyConfig, seed: u64) -> Result<ArmResult> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut per_agent_corr = Vec::with_capacity(cfg.agents_per_arm);
    let mut decisions = Vec::with_capacity(cfg.agents_per_arm);
    let mut excluded = 0;
    for agent in 0..cfg.agents_per_arm {
        let mut rng = seed::rng_from_seed(derive_seed(seed, purpose::AGENT, agent as u64));
        let picks = index::sample(&mut rng, arm.len(), cfg.scenarios_per_agent);
        let mut state = cfg.agent.initial_state();
        let mut shown = Vec::with_capacity(cfg.scenarios_per_agent);
        let mut answers = Vec::with_capacity(cfg.scenarios_per_agent);
        for i in picks.iter() {
            let reported = arm.reported[i];
            let d = agent_decide(&cfg.agent, &state, reported, normal.sample(&mut rng));
            state = agent_update(&cfg.agent, &state, reported, arm.outcomes[i]);
            shown.push(reported.get());
            answers.push(d.likert);
        }
        let as_f64: Vec<f64> = answers.iter().map(|&l| l as f64).collect();
        match pearson(&shown, &as_f64) {
            Ok(r) => per_agent_corr.push(r),
            Err(Error::UndefinedCorrelation) => excluded += 1,
            Err(e) => return Err(e),
        }
        decisions.push(answers);
    }
    let mean_corr = (!per_agent_corr.is_empty())
        .then(|| per_agent_corr.iter().sum::<f64>() / per_agent_corr.len() as f64);
    Ok(ArmResult {
        arm: arm.name,
        per_agent_corr,
        mean_corr,
        excluded,
        decisions,
    })
}

/// End-to-end study: synthetic data → split → calibrator on the validation
/// part → five arms on the test part → agents.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationConfig {
    /// γ of the reporting pipeline (the inverse correction).
    pub gamma: PtParams,
    pub distortion: Distortion,
    pub law: TrueProbLaw,
    pub n: usize,
    pub train_frac: f64,
    pub val_frac: f64,
    pub test_frac: f64,
    pub method: Method,
    pub bins: usize,
    pub strategy: BinStrategy,
    pub study: StudyConfig,
    pub master_seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            gamma: PtParams::default(),
            distortion: Distortion::PtWeight {
                gamma: DEFAULT_GAMMA,
            },
            law: TrueProbLaw::Beta {
                alpha: 0.5,
                beta: 0.5,
            },
            n: 20_000,
            train_frac: 0.8,
            val_frac: 0.1,
            test_frac: 0.1,
            method: Method::Isotonic,
            bins: DEFAULT_BINS,
            strategy: BinStrategy::EqualWidth,
            study: StudyConfig::default(),
            master_seed: 42,
        }
    }
}

impl SimulationConfig {
    /// Same configuration with another master seed.
    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairwiseAnova {
    pub a: ArmName,
    pub b: ArmName,
    pub anova: Option<AnovaResult>,
    /// Why `anova` is missing, when it is.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationReport {
    pub calibrator: CalibratorModel,
    pub arms: Vec<ArmResult>,
    pub pairwise: Vec<PairwiseAnova>,
    /// Pearson correlation between shown probability and outcome in the
    /// random arm; near zero by construction.
    pub random_arm_outcome_corr: f64,
}

impl SimulationReport {
    pub fn arm(&self, name: ArmName) -> &ArmResult {
        self.arms
            .iter()
            .find(|a| a.arm == name)
            .expect("all five arms are always present")
    }

    pub fn pair(&self, a: ArmName, b: ArmName) -> Option<&PairwiseAnova> {
        self.pairwise
            .iter()
            .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
    }

    /// Arm names from highest to lowest mean correlation.
    pub fn ranking(&self) -> Vec<ArmName> {
        let mut v: Vec<(ArmName, f64)> = self
            .arms
            .iter()
            .map(|a| (a.arm, a.mean_corr.unwrap_or(f64::NEG_INFINITY)))
            .collect();
        v.sort_by(|x, y| y.1.total_cmp(&x.1));
        v.into_iter().map(|(n, _)| n).collect()
    }
}

pub fn simulate(cfg: &SimulationConfig) -> Result<SimulationReport> {
    let master = cfg.master_seed;
    let data = synth::generate(&DistortionSpec {
        distortion: cfg.distortion,
        law: cfg.law,
        n: cfg.n,
        seed: derive_seed(master, purpose::SYNTH, 0),
    })?;
    let split = SplitSpec::new(
        cfg.train_frac,
        cfg.val_frac,
        cfg.test_frac,
        derive_seed(master, purpose::SPLIT, 0),
    )?;
    let (_, val, test) = split_dataset(&data, &split)?;
    let calibrator = cfg.method.fit(&val, cfg.bins, cfg.strategy)?;
    let arms = build_arms(
        &test,
        &calibrator,
        &cfg.gamma,
        derive_seed(master, purpose::ARMS, 0),
    )?;
    let results = run_study(&arms, &cfg.study, derive_seed(master, purpose::STUDY, 0))?;

    let mut pairwise = Vec::with_capacity(10);
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let groups = [
                &results[i].per_agent_corr[..],
                &results[j].per_agent_corr[..],
            ];
            let (anova, error) = match anova_oneway(&groups) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(alloc::format!("{e}"))),
            };
            pairwise.push(PairwiseAnova {
                a: results[i].arm,
                b: results[j].arm,
                anova,
                error,
            });
        }
    }

    let random = &arms[4];
    let shown: Vec<f64> = random.reported.iter().map(|p| p.get()).collect();
    let outcomes: Vec<f64> = random.outcomes.iter().map(|l| l.as_f64()).collect();
    let random_arm_outcome_corr = pearson(&shown, &outcomes).unwrap_or(0.0);

    Ok(SimulationReport {
        calibrator,
        arms: results,
        pairwise,
        random_arm_outcome_corr,
    })
}
