//! Subcommands. Each one computes the full contents of its output file and
//! writes it atomically; [`render`] exposes the first half for callers that
//! want the text without touching the filesystem.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ptcal_core::calibrate::{BinStrategy, CalibratorModel, Method, DEFAULT_BINS};
use ptcal_core::metrics::{reliability_data, MetricReport};
use ptcal_core::pt::{PtParams, RoundTripReport, DEFAULT_GAMMA};
use ptcal_core::seed::{derive_seed, purpose};
use ptcal_core::sim::{self, AgentSpec, SimulationConfig, SimulationReport, StudyConfig};
use ptcal_core::synth::{self, Distortion, DistortionSpec, TrueProbLaw};
use ptcal_core::{split_dataset, Dataset, Label, Probability, SplitSpec};
use serde::{Deserialize, Serialize};

use crate::csv_io::{load_csv, write_csv, write_csv_with_column, write_reliability};
use crate::report::{read_header, read_report, write_atomic, Report, RunConfig, RunHeader};

#[derive(Debug, Parser)]
#[command(
    name = "ptcal",
    version,
    about = "Probability calibration with a prospect-theory correction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options accepted by every command and recorded in every output.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Common {
    /// Curvature of the probability weighting function, in (0.279, 1].
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// Number of bins for binning calibrators and binned metrics.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// equal-width or equal-frequency.
    #[arg(long, default_value_t = BinStrategy::EqualWidth)]
    pub strategy: BinStrategy,
    /// Master seed; every random stream is derived from it.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// identity, platt, isotonic, binning, temperature or binning-with-platt.
    #[arg(long, default_value_t = Method::Isotonic)]
    pub method: Method,
    /// Validation share of the train/validation/test split.
    #[arg(long, default_value_t = 0.1)]
    pub val_frac: f64,
    /// Test share of the train/validation/test split.
    #[arg(long, default_value_t = 0.1)]
    pub test_frac: f64,
}

impl Default for Common {
    fn default() -> Self {
        Common {
            gamma: DEFAULT_GAMMA,
            bins: DEFAULT_BINS,
            strategy: BinStrategy::EqualWidth,
            seed: 42,
            method: Method::Isotonic,
            val_frac: 0.1,
            test_frac: 0.1,
        }
    }
}

impl Common {
    pub fn config(&self) -> anyhow::Result<RunConfig> {
        let gamma = PtParams::new(self.gamma)?;
        if self.bins == 0 {
            bail!("--bins must be at least 1");
        }
        let split = SplitSpec::new(
            1.0 - self.val_frac - self.test_frac,
            self.val_frac,
            self.test_frac,
            derive_seed(self.seed, purpose::SPLIT, 0),
        )?;
        Ok(RunConfig {
            gamma,
            bins: self.bins,
            strategy: self.strategy,
            split,
            method: self.method,
            master_seed: self.seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistortionKind {
    Identity,
    Temperature,
    PtWeight,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Uniform,
    Beta,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value_t = DistortionKind::PtWeight)]
    pub distortion: DistortionKind,
    /// Temperature of the `temperature` distortion (below 1 is overconfident).
    #[arg(long, default_value_t = 0.5)]
    pub temperature: f64,
    /// γ of the `pt-weight` distortion.
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub distortion_gamma: f64,
    /// Slope of the `logistic` distortion.
    #[arg(long, default_value_t = 1.0)]
    pub slope: f64,
    /// Intercept of the `logistic` distortion.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub intercept: f64,
    /// Law of the true probabilities.
    #[arg(long, value_enum, default_value_t = LawKind::Uniform)]
    pub law: LawKind,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, short, default_value_t = 10_000)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

impl GenerateArgs {
    pub fn spec(&self, master_seed: u64) -> DistortionSpec {
        let distortion = match self.distortion {
            DistortionKind::Identity => Distortion::Identity,
            DistortionKind::Temperature => Distortion::Temperature {
                t: self.temperature,
            },
            DistortionKind::PtWeight => Distortion::PtWeight {
                gamma: self.distortion_gamma,
            },
            DistortionKind::Logistic => Distortion::Logistic {
                a: self.slope,
                b: self.intercept,
            },
        };
        let law = match self.law {
            LawKind::Uniform => TrueProbLaw::Uniform,
            LawKind::Beta => TrueProbLaw::Beta {
                alpha: self.alpha,
                beta: self.beta,
            },
        };
        DistortionSpec {
            distortion,
            law,
            n: self.n,
            seed: derive_seed(master_seed, purpose::SYNTH, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// Score file (`score,label[,logit]`).
    #[arg(long)]
    pub data: PathBuf,
    /// Fit on every row instead of the validation part of the split.
    #[arg(long)]
    pub all_rows: bool,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ApplyArgs {
    /// Model file written by `fit`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Also apply the inverse weighting correction with `--gamma`.
    #[arg(long)]
    pub pt: bool,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

/// Inputs of `evaluate` and `reliability`.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ScoreArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Calibrate the scores with this model first.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Apply the inverse weighting correction with `--gamma` last.
    #[arg(long)]
    pub pt: bool,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PtArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Size of the synthetic dataset the arms are drawn from.
    #[arg(long, short, default_value_t = 20_000)]
    pub n: usize,
    /// γ of the weighting distortion applied to the synthetic scores.
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub distortion_gamma: f64,
    /// γ the agents perceive with; defaults to `--gamma`.
    #[arg(long)]
    pub agent_gamma: Option<f64>,
    #[arg(long, default_value_t = 30)]
    pub agents: usize,
    #[arg(long, default_value_t = 20)]
    pub scenarios: usize,
    #[arg(long, default_value_t = AgentSpec::default().learning_rate)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = AgentSpec::default().decision_noise_sd)]
    pub noise_sd: f64,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Any file written by ptcal.
    #[arg(long)]
    pub from: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Write a synthetic score file with a known miscalibration.
    Generate(GenerateArgs),
    /// Fit a calibrator and write it as a model file.
    Fit(FitArgs),
    /// Add a `calibrated` column to a score file.
    Apply(ApplyArgs),
    /// Write accuracy, F1, ECE, MCE, OE, NLL and Brier for a score file.
    Evaluate(ScoreArgs),
    /// Fit every calibrator on the validation split and compare them on the test split.
    Compare(CompareArgs),
    /// Write the round-trip accuracy of the approximate inverse weighting.
    Pt(PtArgs),
    /// Run the five-arm agent study.
    Simulate(SimulateArgs),
    /// Write reliability-diagram data as CSV.
    Reliability(ScoreArgs),
    /// Re-run the command recorded in an output file.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Fit(_) => "fit",
            Command::Apply(_) => "apply",
            Command::Evaluate(_) => "evaluate",
            Command::Compare(_) => "compare",
            Command::Pt(_) => "pt",
            Command::Simulate(_) => "simulate",
            Command::Reliability(_) => "reliability",
            Command::Replay(_) => "replay",
        }
    }

    pub fn out(&self) -> &Path {
        match self {
            Command::Generate(a) => &a.out,
            Command::Fit(a) => &a.out,
            Command::Apply(a) => &a.out,
            Command::Evaluate(a) | Command::Reliability(a) => &a.out,
            Command::Compare(a) => &a.out,
            Command::Pt(a) => &a.out,
            Command::Simulate(a) => &a.out,
            Command::Replay(a) => &a.out,
        }
    }

    pub fn set_out(&mut self, out: PathBuf) {
        match self {
            Command::Generate(a) => a.out = out,
            Command::Fit(a) => a.out = out,
            Command::Apply(a) => a.out = out,
            Command::Evaluate(a) | Command::Reliability(a) => a.out = out,
            Command::Compare(a) => a.out = out,
            Command::Pt(a) => a.out = out,
            Command::Simulate(a) => a.out = out,
            Command::Replay(a) => a.out = out,
        }
    }

    fn common(&self) -> Option<&Common> {
        match self {
            Command::Generate(a) => Some(&a.common),
            Command::Fit(a) => Some(&a.common),
            Command::Apply(a) => Some(&a.common),
            Command::Evaluate(a) | Command::Reliability(a) => Some(&a.common),
            Command::Compare(a) => Some(&a.common),
            Command::Pt(a) => Some(&a.common),
            Command::Simulate(a) => Some(&a.common),
            Command::Replay(_) => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    /// Rows the calibrator was fitted on.
    pub n_fit: usize,
    pub model: CalibratorModel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluateResult {
    pub model: Option<Method>,
    pub pt: bool,
    pub metrics: MetricReport,
}

/// The five columns of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareMetrics {
    pub accuracy: f64,
    pub f1: f64,
    pub ece: f64,
    pub nll: f64,
    pub brier: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: String,
    pub metrics: Option<CompareMetrics>,
    /// Why the method could not be fitted, when it could not.
    pub error: Option<String>,
    /// Columns in which this row holds the best value.
    pub best: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareResult {
    pub n_val: usize,
    pub n_test: usize,
    pub rows: Vec<CompareRow>,
    /// The same table as fixed-width text; `*` marks the best value.
    pub table: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PtResult {
    #[serde(flatten)]
    pub roundtrip: RoundTripReport,
    /// `mse_probability2 × 100`, the scale on which a published MSE of
    /// 0.022 is reproduced.
    pub mse_probability2_x100: f64,
}

/// Rows of the comparison, in table order. `None` is the uncalibrated model.
pub const COMPARE_METHODS: [Option<Method>; 5] = [
    None,
    Some(Method::Platt),
    Some(Method::Isotonic),
    Some(Method::BinningWithPlatt),
    Some(Method::Temperature),
];

/// Computes the complete output file of `cmd`.
pub fn render(cmd: &Command) -> anyhow::Result<String> {
    let cfg = match cmd.common() {
        Some(c) => c.config()?,
        None => bail!("replay does not produce output of its own"),
    };
    let header = RunHeader::new(cmd, cfg.clone());
    Ok(match cmd {
        Command::Generate(a) => {
            let d = synth::generate(&a.spec(cfg.master_seed))?;
            header.csv_comment() + &write_csv(&d)
        }
        Command::Fit(a) => {
            let data = load_csv(&a.data)?;
            let fit_on = if a.all_rows {
                data
            } else {
                split_dataset(&data, &cfg.split)?.1
            };
            let model = cfg.method.fit(&fit_on, cfg.bins, cfg.strategy)?;
            Report {
                header,
                result: FitResult {
                    n_fit: fit_on.len(),
                    model,
                },
            }
            .to_json()
        }
        Command::Apply(a) => {
            let model = load_model(&a.model)?;
            let data = load_csv(&a.data)?;
            let pt = a.pt.then_some(cfg.gamma);
            let calibrated: Vec<f64> = predictions(&data, Some(&model), pt)?
                .into_iter()
                .map(|(q, _)| q.get())
                .collect();
            header.csv_comment() + &write_csv_with_column(&data, "calibrated", &calibrated)
        }
        Command::Evaluate(a) => {
            let (model, preds) = score_inputs(a, &cfg)?;
            Report {
                header,
                result: EvaluateResult {
                    model: model.map(|m| m.method()),
                    pt: a.pt,
                    metrics: MetricReport::compute(&preds, cfg.bins)?,
                },
            }
            .to_json()
        }
        Command::Reliability(a) => {
            let (_, preds) = score_inputs(a, &cfg)?;
            header.csv_comment() + &write_reliability(&reliability_data(&preds, cfg.bins)?)
        }
        Command::Compare(a) => {
            let data = load_csv(&a.data)?;
            Report {
                header,
                result: compare(&data, &cfg)?,
            }
            .to_json()
        }
        Command::Pt(_) => {
            let roundtrip = cfg.gamma.roundtrip_report();
            let x100 = roundtrip.mse_probability2 * 100.0;
            Report {
                header,
                result: PtResult {
                    roundtrip,
                    mse_probability2_x100: x100,
                },
            }
            .to_json()
        }
        Command::Simulate(a) => Report {
            header,
            result: simulate(a, &cfg)?,
        }
        .to_json(),
        Command::Replay(_) => unreachable!("handled above"),
    })
}

/// Runs `cmd` and writes its output file.
pub fn execute(cmd: &Command) -> anyhow::Result<()> {
    if let Command::Replay(r) = cmd {
        let mut recorded = read_header(&r.from)?.invocation;
        if matches!(recorded, Command::Replay(_)) {
            bail!("{}: recorded command is itself a replay", r.from.display());
        }
        recorded.set_out(r.out.clone());
        return execute(&recorded);
    }
    let text = render(cmd)?;
    write_atomic(cmd.out(), &text)
}

/// Entry point of the binary. Errors are printed as one `error: …` line.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("{}", first.trim());
            return ExitCode::from(2);
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

pub fn load_model(path: &Path) -> anyhow::Result<CalibratorModel> {
    let r: Report<FitResult> = read_report(path)?;
    r.result
        .model
        .validate()
        .with_context(|| format!("{}", path.display()))?;
    Ok(r.result.model)
}

/// Scores after the optional calibrator and the optional inverse correction.
pub fn predictions(
    data: &Dataset,
    model: Option<&CalibratorModel>,
    pt: Option<PtParams>,
) -> anyhow::Result<Predictions> {
    data.samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let q = match model {
                Some(m) => m.apply(s).with_context(|| format!("row {}", i + 1))?,
                None => s.score(),
            };
            let q = pt.map_or(q, |g| g.inverse(q));
            Ok((q, s.label()))
        })
        .collect()
}

type Predictions = Vec<(Probability, Label)>;

fn score_inputs(
    a: &ScoreArgs,
    cfg: &RunConfig,
) -> anyhow::Result<(Option<CalibratorModel>, Predictions)> {
    let model = a.model.as_deref().map(load_model).transpose()?;
    let data = load_csv(&a.data)?;
    let preds = predictions(&data, model.as_ref(), a.pt.then_some(cfg.gamma))?;
    Ok((model, preds))
}

pub fn compare(data: &Dataset, cfg: &RunConfig) -> anyhow::Result<CompareResult> {
    let (_, val, test) = split_dataset(data, &cfg.split)?;
    test.require_non_empty().context("test split")?;
    let mut rows: Vec<CompareRow> = COMPARE_METHODS
        .iter()
        .map(|m| {
            let name = m.map_or("uncalibrated", Method::as_str).to_string();
            let outcome = (|| -> anyhow::Result<CompareMetrics> {
                let model = m.map(|m| m.fit(&val, cfg.bins, cfg.strategy)).transpose()?;
                let r =
                    MetricReport::compute(&predictions(&test, model.as_ref(), None)?, cfg.bins)?;
                Ok(CompareMetrics {
                    accuracy: r.accuracy,
                    f1: r.f1,
                    ece: r.ece,
                    nll: r.nll,
                    brier: r.brier,
                })
            })();
            match outcome {
                Ok(metrics) => CompareRow {
                    method: name,
                    metrics: Some(metrics),
                    error: None,
                    best: Vec::new(),
                },
                Err(e) => CompareRow {
                    method: name,
                    metrics: None,
                    error: Some(format!("{e:#}")),
                    best: Vec::new(),
                },
            }
        })
        .collect();

    type Column = (&'static str, fn(&CompareMetrics) -> f64, bool);
    let columns: [Column; 5] = [
        ("accuracy", |m| m.accuracy, true),
        ("f1", |m| m.f1, true),
        ("ece", |m| m.ece, false),
        ("nll", |m| m.nll, false),
        ("brier", |m| m.brier, false),
    ];
    for (name, get, higher) in columns {
        let values = rows.iter().filter_map(|r| r.metrics.as_ref().map(get));
        let best = if higher {
            values.fold(f64::NEG_INFINITY, f64::max)
        } else {
            values.fold(f64::INFINITY, f64::min)
        };
        for r in &mut rows {
            if r.metrics.as_ref().map(get) == Some(best) {
                r.best.push(name.to_string());
            }
        }
    }

    let mut table = vec![format!(
        "{:<20} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "method", "acc", "f1", "ece", "nll", "brier"
    )];
    for r in &rows {
        let mut line = format!("{:<20}", r.method);
        match &r.metrics {
            Some(m) => {
                for (name, get, _) in columns {
                    let mark = if r.best.iter().any(|b| b == name) {
                        "*"
                    } else {
                        " "
                    };
                    line.push_str(&format!(" {:>9.6}{mark}", get(m)));
                }
            }
            None => line.push_str(&format!(
                " unavailable: {}",
                r.error.as_deref().unwrap_or("")
            )),
        }
        table.push(line.trim_end().to_string());
    }

    Ok(CompareResult {
        n_val: val.len(),
        n_test: test.len(),
        rows,
        table,
    })
}

fn simulate(a: &SimulateArgs, cfg: &RunConfig) -> anyhow::Result<SimulationReport> {
    let agent_gamma =
        PtParams::new(a.agent_gamma.unwrap_or(cfg.gamma.gamma())).context("--agent-gamma")?;
    PtParams::new(a.distortion_gamma).context("--distortion-gamma")?;
    let defaults = SimulationConfig::default();
    let sim_cfg = SimulationConfig {
        gamma: cfg.gamma,
        distortion: Distortion::PtWeight {
            gamma: a.distortion_gamma,
        },
        law: defaults.law,
        n: a.n,
        train_frac: cfg.split.train_frac,
        val_frac: cfg.split.val_frac,
        test_frac: cfg.split.test_frac,
        method: cfg.method,
        bins: cfg.bins,
        strategy: cfg.strategy,
        study: StudyConfig {
            agent: AgentSpec {
                gamma_agent: agent_gamma,
                learning_rate: a.learning_rate,
                decision_noise_sd: a.noise_sd,
                ..AgentSpec::default()
            },
            scenarios_per_agent: a.scenarios,
            agents_per_arm: a.agents,
        },
        master_seed: cfg.master_seed,
    };
    Ok(sim::simulate(&sim_cfg)?)
}
