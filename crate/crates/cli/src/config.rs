use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use netshare::network::SharingMode;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Seed used by `sos-check` when none is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Critical,
    Sweep,
    MaxObservers,
    SosCheck,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    #[value(alias = "pretty-table")]
    #[serde(alias = "pretty-table")]
    Table,
}

/// A fully resolved run. Can be read from a JSON file with `--config`;
/// command-line flags override file values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub n: usize,
    pub m: usize,
    pub mode: SharingMode,
    /// One schedule per edge, or a single schedule broadcast to every edge in
    /// symmetric mode.
    pub schedules: Option<Vec<Vec<f64>>>,
    pub sharp: bool,
    pub critical: bool,
    pub final_sharp: bool,
    pub sweep_n: Option<Vec<usize>>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub steps: usize,
    pub positions: usize,
    pub n_values: Option<Vec<usize>>,
    pub m_values: Option<Vec<usize>>,
    pub count: usize,
    pub seed: u64,
    pub optimal: bool,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            n: 2,
            m: 2,
            mode: SharingMode::Asymmetric,
            schedules: None,
            sharp: false,
            critical: false,
            final_sharp: false,
            sweep_n: None,
            lambda_min: 0.0,
            lambda_max: 1.0,
            steps: 11,
            positions: 1,
            n_values: None,
            m_values: None,
            count: 1000,
            seed: DEFAULT_SEED,
            optimal: false,
            output: None,
            format: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn command(&self) -> Result<Command, CliError> {
        self.command.ok_or_else(|| CliError::Config("no command given".into()))
    }

    /// Output format, defaulting to a text table for `compare` and CSV
    /// everywhere else.
    pub fn format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Some(Command::Compare) => Format::Table,
            _ => Format::Csv,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let command = self.command()?;
        let bad = |msg: &str| Err(CliError::Config(msg.to_string()));
        if self.n == 0 {
            return bad("--n must be positive");
        }
        if self.m < 2 {
            return bad("--m must be at least 2");
        }
        match command {
            Command::Simulate => {
                let sources = [self.sharp, self.critical, self.schedules.is_some()];
                if sources.iter().filter(|&&s| s).count() != 1 {
                    return bad("simulate needs exactly one of --schedule, --sharp, --critical");
                }
            }
            Command::Critical => {
                if self.sweep_n.as_ref().is_some_and(|v| v.is_empty() || v.contains(&0)) {
                    return bad("--sweep-n needs positive edge counts");
                }
            }
            Command::Sweep => {
                if !(0.0..=1.0).contains(&self.lambda_min)
                    || !(0.0..=1.0).contains(&self.lambda_max)
                    || self.lambda_min > self.lambda_max
                {
                    return bad("sweep needs 0 <= --lambda-min <= --lambda-max <= 1");
                }
                if self.steps == 0 || self.positions == 0 {
                    return bad("sweep needs positive --steps and --positions");
                }
            }
            Command::MaxObservers => {
                if self.n_values.as_ref().is_some_and(|v| v.is_empty() || v.contains(&0))
                    || self.m_values.as_ref().is_some_and(|v| v.is_empty() || v.iter().any(|&m| m < 2))
                {
                    return bad("max-observers needs n >= 1 and m >= 2");
                }
            }
            Command::SosCheck => {
                if self.count == 0 {
                    return bad("--count must be at least 1");
                }
            }
            Command::Compare => {}
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "netshare", version, about = "Sequential sharing of network nonlocality")]
pub struct Cli {
    /// JSON file with run settings; flags given here take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write results to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Option<CliCommand>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Number of edges.
    #[arg(long)]
    pub n: Option<usize>,
    /// Inputs per edge party.
    #[arg(long)]
    pub m: Option<usize>,
    /// symmetric | asymmetric
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<SharingMode>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run a sequence of observers and report every position.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Comma separated unsharpness list; repeat once per edge.
        #[arg(long)]
        schedule: Vec<String>,
        /// One round of sharp measurements.
        #[arg(long)]
        sharp: bool,
        /// Use the critical schedule.
        #[arg(long)]
        critical: bool,
        /// Append a sharp final observer to every sequenced edge.
        #[arg(long)]
        final_sharp: bool,
    },
    /// Critical unsharpness per position.
    Critical {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Edge counts, e.g. `2..9` or `3,6,9`.
        #[arg(long)]
        sweep_n: Option<String>,
    },
    /// Functional versus a constant unsharpness.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        lambda_min: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        positions: Option<usize>,
    },
    /// Maximum number of sequential observers.
    MaxObservers {
        /// Edge counts, e.g. `2..9`.
        #[arg(long = "n")]
        n_values: Option<String>,
        /// Input counts, e.g. `2,3`.
        #[arg(long = "m")]
        m_values: Option<String>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<SharingMode>,
    },
    /// Check the sum-of-squares certificate on random configurations.
    SosCheck {
        #[arg(long)]
        count: Option<usize>,
        /// Use the optimal configuration instead of random ones.
        #[arg(long)]
        optimal: bool,
    },
    /// Closed-form criticals against bisection on the full tensor simulation.
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

fn parse_mode(s: &str) -> Result<SharingMode, String> {
    s.parse::<SharingMode>().map_err(|e| e.to_string())
}

/// Parses `a..b` (inclusive), `a,b,c` or a single integer.
pub fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Config(format!("cannot parse integer list `{s}`"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

pub fn parse_schedule(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("cannot parse schedule `{s}`")))
        })
        .collect()
}

impl Cli {
    /// Merges the optional config file with the flags on the command line.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(cmd) = &self.command {
            let name = cmd.name();
            if cfg.command.is_some_and(|c| c != name) {
                return Err(CliError::Config("config file command differs from the subcommand".into()));
            }
            cfg.command = Some(name);
            cmd.apply(&mut cfg)?;
        }
        if self.format.is_some() {
            cfg.format = self.format;
        }
        if self.output.is_some() {
            cfg.output.clone_from(&self.output);
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ScenarioArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
    }
}

impl CliCommand {
    pub fn name(&self) -> Command {
        match self {
            CliCommand::Simulate { .. } => Command::Simulate,
            CliCommand::Critical { .. } => Command::Critical,
            CliCommand::Sweep { .. } => Command::Sweep,
            CliCommand::MaxObservers { .. } => Command::MaxObservers,
            CliCommand::SosCheck { .. } => Command::SosCheck,
            CliCommand::Compare { .. } => Command::Compare,
        }
    }

    fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        match self {
            CliCommand::Simulate { scenario, schedule, sharp, critical, final_sharp } => {
                scenario.apply(cfg);
                if !schedule.is_empty() {
                    cfg.schedules =
                        Some(schedule.iter().map(|s| parse_schedule(s)).collect::<Result<_, _>>()?);
                }
                cfg.sharp |= sharp;
                cfg.critical |= critical;
                cfg.final_sharp |= final_sharp;
            }
            CliCommand::Critical { scenario, sweep_n } => {
                scenario.apply(cfg);
                if let Some(s) = sweep_n {
                    cfg.sweep_n = Some(parse_list(s)?);
                }
            }
            CliCommand::Sweep { scenario, lambda_min, lambda_max, steps, positions } => {
                scenario.apply(cfg);
                cfg.lambda_min = lambda_min.unwrap_or(cfg.lambda_min);
                cfg.lambda_max = lambda_max.unwrap_or(cfg.lambda_max);
                cfg.steps = steps.unwrap_or(cfg.steps);
                cfg.positions = positions.unwrap_or(cfg.positions);
            }
            CliCommand::MaxObservers { n_values, m_values, mode } => {
                if let Some(s) = n_values {
                    cfg.n_values = Some(parse_list(s)?);
                }
                if let Some(s) = m_values {
                    cfg.m_values = Some(parse_list(s)?);
                }
                if let Some(mode) = mode {
                    cfg.mode = *mode;
                }
            }
            CliCommand::SosCheck { count, optimal } => {
                cfg.count = count.unwrap_or(cfg.count);
                cfg.optimal |= optimal;
            }
            CliCommand::Compare { scenario } => scenario.apply(cfg),
        }
        Ok(())
    }
}
