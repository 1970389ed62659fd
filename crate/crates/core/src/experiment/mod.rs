//! Reproducible experiment suites.
//!
//! Every mode takes an [`ExperimentConfig`], a master seed and a trial
//! count, and returns an [`ExperimentReport`] with per-trial outcomes,
//! order-independent aggregates and named assertions.

mod amd;
mod bounds;
mod reliability;
mod roundtrip;
mod secrecy;
mod ses;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelBudget, StrategySpec};
use crate::codec::{ParamSpec, RhoMode};

pub use self::amd::AmdConfig;
pub use self::bounds::BoundsConfig;
pub use self::reliability::ReliabilityConfig;
pub use self::secrecy::{exact_view_distribution, SecrecyConfig, ViewDistribution};
pub use self::ses::SesConfig;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("enumeration too large: {0}")]
    Scale(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Roundtrip,
    Reliability,
    Secrecy,
    Amd,
    Ses,
    Bounds,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::Roundtrip, Mode::Reliability, Mode::Secrecy, Mode::Amd, Mode::Ses, Mode::Bounds];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Roundtrip => "roundtrip",
            Mode::Reliability => "reliability",
            Mode::Secrecy => "secrecy",
            Mode::Amd => "amd",
            Mode::Ses => "ses",
            Mode::Bounds => "bounds",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ExperimentError::Config(format!("unknown mode {s:?}")))
    }
}

/// Experiment configuration file. Sections irrelevant to the chosen mode
/// are ignored; missing sections fall back to built-in defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub params: Option<ParamSpec>,
    #[serde(default)]
    pub rho_mode: RhoMode,
    #[serde(default)]
    pub strategy: Option<StrategySpec>,
    /// Overrides the budget derived from the parameters.
    #[serde(default)]
    pub channel: Option<ChannelBudget>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub reliability: Option<ReliabilityConfig>,
    #[serde(default)]
    pub secrecy: Option<SecrecyConfig>,
    #[serde(default)]
    pub amd: Option<AmdConfig>,
    #[serde(default)]
    pub ses: Option<SesConfig>,
    #[serde(default)]
    pub bounds: Option<BoundsConfig>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(s).map_err(|e| ExperimentError::Config(e.to_string()))
    }
}

pub const SEED_SCHEME: &str =
    "trial i uses ChaCha8Rng::seed_from_u64(master_seed) with stream i; strategies reseed from their trial stream";

/// The per-trial generator.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Bottom,
    Incorrect,
    Aborted,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregates {
    pub ok: u64,
    pub bottom: u64,
    pub incorrect: u64,
    pub aborted: u64,
    pub mismatches: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_sd: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tamper_pass: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_intersection: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl Aggregates {
    fn tally(&mut self, o: Outcome) {
        match o {
            Outcome::Ok => self.ok += 1,
            Outcome::Bottom => self.bottom += 1,
            Outcome::Incorrect => self.incorrect += 1,
            Outcome::Aborted => self.aborted += 1,
            Outcome::Mismatch => self.mismatches += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Assertion { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub seed: u64,
    pub trials: u64,
    pub seed_scheme: String,
    /// Fully resolved parameters, echoed for auditing.
    pub params: serde_json::Value,
    pub aggregates: Aggregates,
    pub assertions: Vec<Assertion>,
    pub outcomes: Vec<TrialOutcome>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub table: Vec<BTreeMap<String, String>>,
    pub wall_clock_ms: f64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

/// What a mode produces before bookkeeping is attached.
pub(crate) struct ModeResult {
    params: serde_json::Value,
    outcomes: Vec<TrialOutcome>,
    aggregates: Aggregates,
    assertions: Vec<Assertion>,
    table: Vec<BTreeMap<String, String>>,
}

impl ModeResult {
    fn new(params: serde_json::Value, outcomes: Vec<TrialOutcome>) -> Self {
        let mut aggregates = Aggregates::default();
        for o in &outcomes {
            aggregates.tally(o.outcome);
        }
        ModeResult { params, outcomes, aggregates, assertions: Vec::new(), table: Vec::new() }
    }
}

/// Runs one experiment. `seed` and `trials` override the config file.
pub fn run(
    mode: Mode,
    config: &ExperimentConfig,
    seed: Option<u64>,
    trials: Option<u64>,
) -> Result<ExperimentReport, ExperimentError> {
    if let Some(m) = config.mode {
        if m != mode {
            return Err(ExperimentError::Config(format!("config is for mode {m}, requested {mode}")));
        }
    }
    let seed = seed.or(config.seed).unwrap_or(0);
    let trials = trials.or(config.trials).unwrap_or(match mode {
        Mode::Roundtrip | Mode::Ses => 100,
        Mode::Reliability => 500,
        Mode::Secrecy | Mode::Amd | Mode::Bounds => 1,
    });
    if trials == 0 {
        return Err(ExperimentError::Config("trials must be at least 1".into()));
    }
    let start = Instant::now();
    let res = match mode {
        Mode::Roundtrip => roundtrip::run(config, seed, trials)?,
        Mode::Reliability => reliability::run(config, seed, trials)?,
        Mode::Secrecy => secrecy::run(config)?,
        Mode::Amd => amd::run(config)?,
        Mode::Ses => ses::run(config, seed, trials)?,
        Mode::Bounds => bounds::run(config)?,
    };
    Ok(ExperimentReport {
        mode,
        seed,
        trials,
        seed_scheme: SEED_SCHEME.to_string(),
        params: res.params,
        aggregates: res.aggregates,
        assertions: res.assertions,
        outcomes: res.outcomes,
        table: res.table,
        wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
