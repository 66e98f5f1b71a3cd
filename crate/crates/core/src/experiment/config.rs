//! Experiment configuration: a flat key=value file, overridable per key, and
//! the builders that turn parsed specs into live components.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::environment::{Adversary, AdviceGenerator, EnvError, LossFunction};
use crate::schedule::{LearningRateSchedule, ScheduleError, ScheduleWarning};

/// Keys understood in config files and as flag overrides.
pub const CONFIG_KEYS: &[&str] = &[
    "experts",
    "horizon",
    "schedule",
    "loss",
    "adversary",
    "advice",
    "seed",
    "verify",
    "format",
    "out",
];

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigError {
    MissingKey {
        key: &'static str,
    },
    UnknownKey {
        key: String,
    },
    InvalidValue {
        key: &'static str,
        value: String,
        reason: String,
    },
    /// File-level problem; the original I/O error is flattened to a message.
    Io {
        path: PathBuf,
        message: String,
    },
    Schedule(ScheduleError),
    Env(EnvError),
    /// The advice source serves a different number of experts than requested.
    AdviceExpertMismatch {
        experts: usize,
        advice: usize,
    },
    /// A scripted source does not cover the horizon.
    ScriptTooShort {
        what: &'static str,
        have: usize,
        need: usize,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingKey { key } => write!(f, "missing required key '{key}'"),
            Self::UnknownKey { key } => write!(f, "unknown config key '{key}'"),
            Self::InvalidValue { key, value, reason } => {
                write!(f, "invalid {key} '{value}': {reason}")
            }
            Self::Io { path, message } => write!(f, "{}: {message}", path.display()),
            Self::Schedule(e) => write!(f, "schedule: {e}"),
            Self::Env(e) => write!(f, "environment: {e}"),
            Self::AdviceExpertMismatch { experts, advice } => write!(
                f,
                "advice source has {advice} experts but the run asks for {experts}"
            ),
            Self::ScriptTooShort { what, have, need } => {
                write!(
                    f,
                    "{what} script covers {have} rounds, horizon needs {need}"
                )
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<ScheduleError> for ConfigError {
    fn from(e: ScheduleError) -> Self {
        Self::Schedule(e)
    }
}

impl From<EnvError> for ConfigError {
    fn from(e: EnvError) -> Self {
        Self::Env(e)
    }
}

// ---------------------------------------------------------------------------
// Raw key=value layer
// ---------------------------------------------------------------------------

/// Parsed but untyped configuration: file entries with flag overrides on top.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<&'static str, String>,
}

impl RawConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads a flat key=value file. Blank lines and '#' comments are skipped;
    /// later entries for the same key win.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut raw = Self::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Io {
                path: path.to_path_buf(),
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            raw.set(key.trim(), value.trim())?;
        }
        Ok(raw)
    }

    /// Sets one entry, overriding any earlier value for the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let canonical = CONFIG_KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| ConfigError::UnknownKey { key: key.into() })?;
        self.entries.insert(canonical, value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Typed scalar configuration for a single experiment run.
    pub fn experiment(&self) -> Result<ExperimentConfig, ConfigError> {
        let experts = parse_scalar(self.required("experts")?, "experts")?;
        let horizon = parse_scalar(self.required("horizon")?, "horizon")?;
        Ok(ExperimentConfig {
            num_experts: experts,
            horizon,
            schedule: self.parsed_or("schedule", ScheduleSpec::Sqrt4, ScheduleSpec::parse)?,
            loss: self.parsed_or("loss", LossKind::Absolute, LossKind::parse)?,
            adversary: self.parsed_or(
                "adversary",
                AdversarySpec::Adaptive,
                AdversarySpec::parse,
            )?,
            advice: self.parsed_or("advice", AdviceSpec::Walk(0.1), AdviceSpec::parse)?,
            seed: self.parsed_or("seed", 0, |v| {
                v.parse().map_err(|_| ConfigError::InvalidValue {
                    key: "seed",
                    value: v.into(),
                    reason: "expected an unsigned 64-bit integer".into(),
                })
            })?,
            verify: self.parsed_or("verify", false, parse_bool)?,
            format: self.parsed_or("format", OutputFormat::Csv, OutputFormat::parse)?,
            out: self.get("out").map(PathBuf::from),
        })
    }

    /// Typed list configuration for the bound table.
    pub fn bound_table(&self) -> Result<BoundTableRequest, ConfigError> {
        let experts = parse_list(self.required("experts")?, "experts", parse_scalar)?;
        let horizons = parse_list(self.required("horizon")?, "horizon", parse_scalar)?;
        let schedules = match self.get("schedule") {
            Some(v) => parse_list(v, "schedule", |tok, _| ScheduleSpec::parse(tok))?,
            None => vec![ScheduleSpec::Sqrt4],
        };
        Ok(BoundTableRequest {
            experts: sorted_unique(experts),
            horizons: sorted_unique(horizons),
            schedules,
            format: self.parsed_or("format", OutputFormat::Csv, OutputFormat::parse)?,
            out: self.get("out").map(PathBuf::from),
        })
    }

    fn required(&self, key: &'static str) -> Result<&str, ConfigError> {
        self.get(key).ok_or(ConfigError::MissingKey { key })
    }

    fn parsed_or<T>(
        &self,
        key: &str,
        default: T,
        parse: impl Fn(&str) -> Result<T, ConfigError>,
    ) -> Result<T, ConfigError> {
        self.get(key).map_or(Ok(default), parse)
    }
}

fn parse_scalar(value: &str, key: &'static str) -> Result<usize, ConfigError> {
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| ConfigError::InvalidValue {
            key,
            value: value.into(),
            reason: "expected a positive integer".into(),
        })?;
    if n == 0 {
        return Err(ConfigError::InvalidValue {
            key,
            value: value.into(),
            reason: "must be at least 1".into(),
        });
    }
    Ok(n)
}

fn parse_bool(value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::InvalidValue {
            key: "verify",
            value: value.into(),
            reason: "expected true or false".into(),
        }),
    }
}

fn parse_list<T>(
    value: &str,
    key: &'static str,
    parse: impl Fn(&str, &'static str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|tok| !tok.is_empty())
        .map(|tok| parse(tok, key))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|items| {
            if items.is_empty() {
                Err(ConfigError::InvalidValue {
                    key,
                    value: value.into(),
                    reason: "list is empty".into(),
                })
            } else {
                Ok(items)
            }
        })
}

fn sorted_unique(mut values: Vec<usize>) -> Vec<usize> {
    values.sort_unstable();
    values.dedup();
    values
}

// ---------------------------------------------------------------------------
// Spec tokens
// ---------------------------------------------------------------------------

/// Schedule selector: `paper` | `cbl` | `constant:<v>` | `custom:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleSpec {
    /// `paper`: η_t = √(4 ln N / t).
    Sqrt4,
    /// `cbl`: η_t = √(8 ln N / t).
    Sqrt8,
    Constant(f64),
    CustomFile(PathBuf),
}

impl ScheduleSpec {
    pub fn parse(token: &str) -> Result<Self, ConfigError> {
        let invalid = |reason: &str| ConfigError::InvalidValue {
            key: "schedule",
            value: token.into(),
            reason: reason.into(),
        };
        match token.split_once(':') {
            None if token == "paper" => Ok(Self::Sqrt4),
            None if token == "cbl" => Ok(Self::Sqrt8),
            Some(("constant", v)) => {
                let value: f64 = v
                    .parse()
                    .map_err(|_| invalid("expected constant:<value>"))?;
                Ok(Self::Constant(value))
            }
            Some(("custom", path)) if !path.is_empty() => Ok(Self::CustomFile(path.into())),
            _ => Err(invalid(
                "expected paper, cbl, constant:<v>, or custom:<path>",
            )),
        }
    }

    /// Builds the schedule; custom files are loaded here.
    pub fn build(&self, num_experts: usize) -> Result<LearningRateSchedule, ConfigError> {
        match self {
            Self::Sqrt4 => Ok(LearningRateSchedule::sqrt_decay4(num_experts)?),
            Self::Sqrt8 => Ok(LearningRateSchedule::sqrt_decay8(num_experts)?),
            Self::Constant(v) => Ok(LearningRateSchedule::constant(*v)?),
            Self::CustomFile(path) => {
                let values = read_floats(path, "schedule")?;
                Ok(LearningRateSchedule::custom(values)?)
            }
        }
    }
}

impl fmt::Display for ScheduleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sqrt4 => write!(f, "paper"),
            Self::Sqrt8 => write!(f, "cbl"),
            Self::Constant(v) => write!(f, "constant:{v}"),
            Self::CustomFile(path) => write!(f, "custom:{}", path.display()),
        }
    }
}

/// Loss selector: `abs` | `sq`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossKind {
    Absolute,
    Squared,
}

impl LossKind {
    pub fn parse(token: &str) -> Result<Self, ConfigError> {
        match token {
            "abs" => Ok(Self::Absolute),
            "sq" => Ok(Self::Squared),
            _ => Err(ConfigError::InvalidValue {
                key: "loss",
                value: token.into(),
                reason: "expected abs or sq".into(),
            }),
        }
    }

    pub fn build(self) -> LossFunction {
        match self {
            Self::Absolute => LossFunction::Absolute,
            Self::Squared => LossFunction::Squared,
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Absolute => write!(f, "abs"),
            Self::Squared => write!(f, "sq"),
        }
    }
}

/// Adversary selector: `adaptive` | `bernoulli:<p>` | `fixed:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum AdversarySpec {
    Adaptive,
    Bernoulli(f64),
    FixedFile(PathBuf),
}

impl AdversarySpec {
    pub fn parse(token: &str) -> Result<Self, ConfigError> {
        let invalid = |reason: &str| ConfigError::InvalidValue {
            key: "adversary",
            value: token.into(),
            reason: reason.into(),
        };
        match token.split_once(':') {
            None if token == "adaptive" => Ok(Self::Adaptive),
            Some(("bernoulli", p)) => {
                let p: f64 = p.parse().map_err(|_| invalid("expected bernoulli:<p>"))?;
                Ok(Self::Bernoulli(p))
            }
            Some(("fixed", path)) if !path.is_empty() => Ok(Self::FixedFile(path.into())),
            _ => Err(invalid("expected adaptive, bernoulli:<p>, or fixed:<path>")),
        }
    }

    pub fn build(&self, seed: u64) -> Result<Adversary, ConfigError> {
        match self {
            Self::Adaptive => Ok(Adversary::adaptive_worst_case()),
            Self::Bernoulli(p) => Ok(Adversary::stochastic(*p, seed)?),
            Self::FixedFile(path) => {
                let outcomes = read_floats(path, "adversary")?;
                Ok(Adversary::fixed(outcomes)?)
            }
        }
    }
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Adaptive => write!(f, "adaptive"),
            Self::Bernoulli(p) => write!(f, "bernoulli:{p}"),
            Self::FixedFile(path) => write!(f, "fixed:{}", path.display()),
        }
    }
}

/// Advice selector: `constant:<csv>` | `walk:<step>` | `fixed:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum AdviceSpec {
    Constant(Vec<f64>),
    Walk(f64),
    FixedFile(PathBuf),
}

impl AdviceSpec {
    pub fn parse(token: &str) -> Result<Self, ConfigError> {
        let invalid = |reason: &str| ConfigError::InvalidValue {
            key: "advice",
            value: token.into(),
            reason: reason.into(),
        };
        match token.split_once(':') {
            Some(("constant", csv)) => {
                let values = csv
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| invalid("expected constant:<comma-separated values>"))?;
                if values.is_empty() {
                    return Err(invalid("constant advice needs at least one value"));
                }
                Ok(Self::Constant(values))
            }
            Some(("walk", step)) => {
                let step: f64 = step.parse().map_err(|_| invalid("expected walk:<step>"))?;
                Ok(Self::Walk(step))
            }
            Some(("fixed", path)) if !path.is_empty() => Ok(Self::FixedFile(path.into())),
            _ => Err(invalid(
                "expected constant:<csv>, walk:<step>, or fixed:<path>",
            )),
        }
    }

    pub fn build(&self, num_experts: usize, seed: u64) -> Result<AdviceGenerator, ConfigError> {
        match self {
            Self::Constant(values) => Ok(AdviceGenerator::constant(values.clone())?),
            Self::Walk(step) => Ok(AdviceGenerator::random_walk(num_experts, *step, seed)?),
            Self::FixedFile(path) => {
                let rows = read_float_rows(path)?;
                Ok(AdviceGenerator::fixed(rows)?)
            }
        }
    }
}

impl fmt::Display for AdviceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(values) => {
                write!(f, "constant:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
            Self::Walk(step) => write!(f, "walk:{step}"),
            Self::FixedFile(path) => write!(f, "fixed:{}", path.display()),
        }
    }
}

/// Output format: `csv` | `json`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(token: &str) -> Result<Self, ConfigError> {
        match token {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(ConfigError::InvalidValue {
                key: "format",
                value: token.into(),
                reason: "expected csv or json".into(),
            }),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Csv => write!(f, "csv"),
            Self::Json => write!(f, "json"),
        }
    }
}

// ---------------------------------------------------------------------------
// Full experiment configuration
// ---------------------------------------------------------------------------

/// One experiment, fully specified.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub num_experts: usize,
    pub horizon: usize,
    pub schedule: ScheduleSpec,
    pub loss: LossKind,
    pub adversary: AdversarySpec,
    pub advice: AdviceSpec,
    pub seed: u64,
    pub verify: bool,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

/// Live components for a validated configuration.
#[derive(Debug)]
pub struct PreparedExperiment {
    pub schedule: LearningRateSchedule,
    pub loss: LossFunction,
    pub adversary: Adversary,
    pub advice: AdviceGenerator,
    pub warnings: Vec<ScheduleWarning>,
}

impl ExperimentConfig {
    /// Loads referenced files and validates every component against the
    /// horizon and expert count. Nothing runs unless this succeeds.
    pub fn prepare(&self) -> Result<PreparedExperiment, ConfigError> {
        if self.num_experts == 0 {
            return Err(ConfigError::InvalidValue {
                key: "experts",
                value: "0".into(),
                reason: "must be at least 1".into(),
            });
        }
        if self.horizon == 0 {
            return Err(ConfigError::InvalidValue {
                key: "horizon",
                value: "0".into(),
                reason: "must be at least 1".into(),
            });
        }
        let schedule = self.schedule.build(self.num_experts)?;
        let warnings = schedule.validate(self.horizon)?;

        // Component streams draw independent sub-seeds from the config seed.
        let mut master = ChaCha8Rng::seed_from_u64(self.seed);
        let advice_seed: u64 = master.gen();
        let adversary_seed: u64 = master.gen();

        let advice = self.advice.build(self.num_experts, advice_seed)?;
        if advice.num_experts() != self.num_experts {
            return Err(ConfigError::AdviceExpertMismatch {
                experts: self.num_experts,
                advice: advice.num_experts(),
            });
        }
        if let Some(rounds) = advice.rounds_available() {
            if rounds < self.horizon {
                return Err(ConfigError::ScriptTooShort {
                    what: "advice",
                    have: rounds,
                    need: self.horizon,
                });
            }
        }

        let adversary = self.adversary.build(adversary_seed)?;
        if let Some(rounds) = adversary.rounds_available() {
            if rounds < self.horizon {
                return Err(ConfigError::ScriptTooShort {
                    what: "outcome",
                    have: rounds,
                    need: self.horizon,
                });
            }
        }

        Ok(PreparedExperiment {
            schedule,
            loss: self.loss.build(),
            adversary,
            advice,
            warnings,
        })
    }
}

/// The bound-table request: the cross product of experts × horizons ×
/// schedules.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundTableRequest {
    pub experts: Vec<usize>,
    pub horizons: Vec<usize>,
    pub schedules: Vec<ScheduleSpec>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

fn read_floats(path: &Path, what: &'static str) -> Result<Vec<f64>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut values = Vec::new();
    for token in text.split_whitespace() {
        values.push(
            token
                .parse::<f64>()
                .map_err(|_| ConfigError::InvalidValue {
                    key: what,
                    value: token.into(),
                    reason: format!("non-numeric entry in {}", path.display()),
                })?,
        );
    }
    Ok(values)
}

fn read_float_rows(path: &Path) -> Result<Vec<Vec<f64>>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split([',', ' ', '\t'])
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| ConfigError::InvalidValue {
                    key: "advice",
                    value: tok.into(),
                    reason: format!("non-numeric entry in {}", path.display()),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}
