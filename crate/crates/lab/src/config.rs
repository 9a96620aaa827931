//! Experiment configuration: a flat `key = value` text format whose keys
//! double as CLI override names.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use rislab_core::environment::{LogBase, Scenario, SystemConfig};
use rislab_core::explorer::PerturbationMode;
use rislab_core::sac::{AgentConfig, ExplorerConfig};
use sha2::{Digest, Sha256};

/// The three training setups compared in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RunScenario {
    Golden,
    Mismatch,
    BetaSpace,
}

impl RunScenario {
    pub const ALL: [RunScenario; 3] = [RunScenario::Golden, RunScenario::Mismatch, RunScenario::BetaSpace];

    pub fn name(self) -> &'static str {
        match self {
            RunScenario::Golden => "golden",
            RunScenario::Mismatch => "mismatch",
            RunScenario::BetaSpace => "beta_space",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RunScenario::Golden => "Golden standard",
            RunScenario::Mismatch => "Mismatch",
            RunScenario::BetaSpace => "Beta-space exploration",
        }
    }
}

impl FromStr for RunScenario {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "golden" => Ok(RunScenario::Golden),
            "mismatch" => Ok(RunScenario::Mismatch),
            "beta_space" | "beta-space" | "beta" => Ok(RunScenario::BetaSpace),
            _ => bail!("unknown scenario `{s}` (golden | mismatch | beta_space)"),
        }
    }
}

/// Lower end of the explorer's amplitude range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaLoMode {
    /// The true `β_min` of the hardware.
    TrueMin,
    /// `0`: the explorer assumes nothing about the hardware.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub agent: AgentConfig,
    pub scenario: RunScenario,
    pub seeds: Vec<u64>,
    pub steps: u64,
    pub out_dir: PathBuf,
    pub perturbation: PerturbationMode,
    pub beta_lo: BetaLoMode,
    pub lambda0: f64,
    pub power_sweep: Vec<f64>,
    /// Worker threads for seed-level parallelism; 0 = available cores.
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: SystemConfig::default(),
            agent: AgentConfig::default(),
            scenario: RunScenario::Golden,
            seeds: (0..10).collect(),
            steps: 20_000,
            out_dir: PathBuf::from("runs"),
            perturbation: PerturbationMode::Blended,
            beta_lo: BetaLoMode::TrueMin,
            lambda0: 0.3,
            power_sweep: vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            threads: 0,
        }
    }
}

/// Keys that only admit the listed value.
const FIXED_KEYS: &[(&str, &str)] = &[
    ("hidden_layers", "2"),
    ("hidden_activation", "relu"),
    ("critic_output_activation", "linear"),
    ("actor_output_activation", "tanh"),
    ("explorer_output_activation", "tanh"),
    ("weight_decay", "none"),
    ("weight_init", "xavier_uniform"),
    ("optimizer", "adam"),
    ("replay_sampling", "uniform"),
    ("update_interval", "1"),
    ("channel_init", "rayleigh"),
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

/// `0..10` (half-open) or a comma list.
fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = value.split_once("..") {
        let (a, b): (u64, u64) = (parse("seeds", a.trim())?, parse("seeds", b.trim())?);
        return Ok((a..b).collect());
    }
    parse_list("seeds", value)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (s, a) = (&mut self.system, &mut self.agent);
        match key {
            "users" => s.users = parse(key, value)?,
            "antennas" => s.antennas = parse(key, value)?,
            "elements" => s.elements = parse(key, value)?,
            "power_dbm" => s.power_dbm = parse(key, value)?,
            "noise_power" => s.noise_power = parse(key, value)?,
            "error_variance" => s.error_variance = parse(key, value)?,
            "beta_min" => s.beta_min = parse(key, value)?,
            "mu" => s.mu = parse(key, value)?,
            "kappa" => s.kappa = parse(key, value)?,
            "log_base" => {
                s.log_base = match value {
                    "2" => LogBase::Two,
                    "e" | "natural" => LogBase::Natural,
                    _ => bail!("log_base must be 2 or e, got `{value}`"),
                }
            }
            "hidden_units" => a.hidden = parse(key, value)?,
            "lr" => a.lr = parse(key, value)?,
            "batch_size" => a.batch_size = parse(key, value)?,
            "buffer_size" => a.buffer_capacity = parse(key, value)?,
            "gamma" => a.gamma = parse(key, value)?,
            "tau" => a.tau = parse(key, value)?,
            "initial_alpha" => a.initial_alpha = parse(key, value)?,
            "target_entropy" => {
                a.target_entropy = match value {
                    "auto" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "adam_beta1" => a.adam_beta1 = parse(key, value)?,
            "adam_beta2" => a.adam_beta2 = parse(key, value)?,
            "adam_eps" => a.adam_eps = parse(key, value)?,
            "log_std_min" => a.log_std_min = parse(key, value)?,
            "log_std_max" => a.log_std_max = parse(key, value)?,
            "squash_eps" => a.squash_eps = parse(key, value)?,
            "bias_init" => a.bias_init = parse(key, value)?,
            "lambda0" => self.lambda0 = parse(key, value)?,
            "scenario" => self.scenario = value.parse()?,
            "seeds" => self.seeds = parse_seeds(value)?,
            "steps" => self.steps = parse(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "perturbation" => {
                self.perturbation = match value {
                    "blended" => PerturbationMode::Blended,
                    "literal" => PerturbationMode::Literal,
                    _ => bail!("perturbation must be blended or literal, got `{value}`"),
                }
            }
            "beta_lo" => {
                self.beta_lo = match value {
                    "true_min" => BetaLoMode::TrueMin,
                    "zero" => BetaLoMode::Zero,
                    _ => bail!("beta_lo must be true_min or zero, got `{value}`"),
                }
            }
            "power_sweep" => self.power_sweep = parse_list(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            _ => match FIXED_KEYS.iter().find(|(k, _)| *k == key) {
                Some((_, fixed)) if *fixed == value => {}
                Some((_, fixed)) => bail!("`{key}` only supports `{fixed}`, got `{value}`"),
                None => bail!("unknown configuration key `{key}`"),
            },
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", no + 1))?;
            self.set(k.trim(), v.trim())
                .with_context(|| format!("line {}", no + 1))?;
        }
        Ok(())
    }

    /// Applies `key=value` overrides.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let (k, v) = o
                .as_ref()
                .split_once('=')
                .ok_or_else(|| anyhow!("override `{}` is not `key=value`", o.as_ref()))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Keys that shape a single run's dynamics, excluding scenario and seed.
    fn setting_lines(&self) -> String {
        let (s, a) = (&self.system, &self.agent);
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("users", s.users.to_string());
        kv("antennas", s.antennas.to_string());
        kv("elements", s.elements.to_string());
        kv("power_dbm", s.power_dbm.to_string());
        kv("noise_power", s.noise_power.to_string());
        kv("error_variance", s.error_variance.to_string());
        kv("beta_min", s.beta_min.to_string());
        kv("mu", s.mu.to_string());
        kv("kappa", s.kappa.to_string());
        kv(
            "log_base",
            match s.log_base {
                LogBase::Two => "2".into(),
                LogBase::Natural => "e".into(),
            },
        );
        for (k, v) in FIXED_KEYS {
            kv(k, (*v).into());
        }
        kv("hidden_units", a.hidden.to_string());
        kv("lr", a.lr.to_string());
        kv("bias_init", a.bias_init.to_string());
        kv("adam_beta1", a.adam_beta1.to_string());
        kv("adam_beta2", a.adam_beta2.to_string());
        kv("adam_eps", a.adam_eps.to_string());
        kv("steps", self.steps.to_string());
        kv("buffer_size", a.buffer_capacity.to_string());
        kv("batch_size", a.batch_size.to_string());
        kv("gamma", a.gamma.to_string());
        kv("tau", a.tau.to_string());
        kv("initial_alpha", a.initial_alpha.to_string());
        kv(
            "target_entropy",
            a.target_entropy.map_or("auto".into(), |t| t.to_string()),
        );
        kv("log_std_min", a.log_std_min.to_string());
        kv("log_std_max", a.log_std_max.to_string());
        kv("squash_eps", a.squash_eps.to_string());
        kv("lambda0", self.lambda0.to_string());
        kv(
            "perturbation",
            match self.perturbation {
                PerturbationMode::Blended => "blended".into(),
                PerturbationMode::Literal => "literal".into(),
            },
        );
        kv(
            "beta_lo",
            match self.beta_lo {
                BetaLoMode::TrueMin => "true_min".into(),
                BetaLoMode::Zero => "zero".into(),
            },
        );
        out
    }

    /// Full round-trippable rendering.
    pub fn to_text(&self) -> String {
        let mut out = self.setting_lines();
        let _ = writeln!(out, "scenario = {}", self.scenario.name());
        let _ = writeln!(out, "seeds = {}", join(&self.seeds));
        let _ = writeln!(out, "out_dir = {}", self.out_dir.display());
        let _ = writeln!(out, "power_sweep = {}", join(&self.power_sweep));
        let _ = writeln!(out, "threads = {}", self.threads);
        out
    }

    /// 12 hex digits identifying the setting (all run-shaping keys except
    /// scenario and seed).
    pub fn setting_hash(&self) -> String {
        let digest = Sha256::digest(self.setting_lines().as_bytes());
        digest[..6].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            bail!("at least one seed is required");
        }
        if self.steps == 0 {
            bail!("steps must be positive");
        }
        self.system_for(self.scenario).validate()?;
        self.agent_for(self.scenario).validate()?;
        Ok(())
    }

    /// Environment configuration the agent of `scenario` trains in.
    pub fn system_for(&self, scenario: RunScenario) -> SystemConfig {
        SystemConfig {
            scenario: match scenario {
                RunScenario::Golden => Scenario::Golden,
                RunScenario::Mismatch | RunScenario::BetaSpace => Scenario::Mismatch,
            },
            ..self.system.clone()
        }
    }

    pub fn agent_for(&self, scenario: RunScenario) -> AgentConfig {
        AgentConfig {
            explorer: (scenario == RunScenario::BetaSpace).then_some(ExplorerConfig {
                lambda0: self.lambda0,
                mode: self.perturbation,
                beta_lo: match self.beta_lo {
                    BetaLoMode::TrueMin => self.system.beta_min,
                    BetaLoMode::Zero => 0.0,
                },
            }),
            ..self.agent.clone()
        }
    }

    /// `{scenario}_{setting-hash}_{seed}`.
    pub fn run_stem(&self, scenario: RunScenario, seed: u64) -> String {
        format!("{}_{}_{}", scenario.name(), self.setting_hash(), seed)
    }

    pub fn with_scenario(&self, scenario: RunScenario) -> Self {
        Self {
            scenario,
            ..self.clone()
        }
    }

    pub fn with_power(&self, power_dbm: f64) -> Self {
        let mut cfg = self.clone();
        cfg.system.power_dbm = power_dbm;
        cfg
    }
}
