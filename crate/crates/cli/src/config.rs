//! Argument parsing and the validated run configuration.

use std::f64::consts::{FRAC_PI_4, PI};
use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qka_core::qka::{KeyBits, ProtocolParams};

use crate::CliError;

pub const DEFAULT_THETA: f64 = PI / 5.0;
pub const DEFAULT_TRIALS: u64 = 1000;
pub const SEED_ENV: &str = "QKA_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Attack,
    Discriminate,
    Nosignal,
    FullReport,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Attack => "attack",
            Command::Discriminate => "discriminate",
            Command::Nosignal => "nosignal",
            Command::FullReport => "full-report",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// A fully validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: ProtocolParams,
    pub trials: u64,
    pub seed: u64,
    /// Present exactly when `command` is [`Command::Attack`].
    pub target: Option<KeyBits>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn theta(&self) -> f64 {
        self.params.theta()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qka",
    version,
    about = "Simulate the inner-product QKA protocol and check why it cannot work"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run honest protocol rounds and tally the agreed keys.
    Simulate(Common),
    /// Let a dishonest Bob force a chosen key on Alice.
    Attack {
        #[command(flatten)]
        common: Common,
        /// Key Bob wants Alice to end up with: 00, 01, 10 or 11.
        #[arg(long, value_parser = parse_key)]
        target: KeyBits,
    },
    /// Compute the optimal success for telling the four candidate states apart.
    Discriminate(Common),
    /// Compare Alice's reduced states for Bob's two measurement bases.
    Nosignal(Common),
    /// Everything above in one report, with the attack run for every target.
    FullReport(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Preparation angle in radians: alpha = cos(theta), beta = sin(theta).
    #[arg(long, default_value_t = DEFAULT_THETA, allow_negative_numbers = true)]
    theta: f64,
    /// Number of seeded protocol rounds.
    #[arg(long, default_value_t = DEFAULT_TRIALS, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Master seed; per-round seeds are derived from it.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_key(s: &str) -> Result<KeyBits, String> {
    KeyBits::parse(s).ok_or_else(|| format!("`{s}` is not one of 00, 01, 10, 11"))
}

/// Parses the arguments that follow the program name.
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("qka")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(Box::new(e)))?;
    let (command, common, target) = match cli.command {
        Sub::Simulate(c) => (Command::Simulate, c, None),
        Sub::Attack { common, target } => (Command::Attack, common, Some(target)),
        Sub::Discriminate(c) => (Command::Discriminate, c, None),
        Sub::Nosignal(c) => (Command::Nosignal, c, None),
        Sub::FullReport(c) => (Command::FullReport, c, None),
    };
    Ok(RunConfig {
        command,
        params: check_theta(common.theta)?,
        trials: common.trials,
        seed: common.seed,
        target,
        output: common.output,
        format: common.format,
    })
}

fn check_theta(theta: f64) -> Result<ProtocolParams, CliError> {
    let invalid = |message: String| CliError::InvalidArg {
        flag: "--theta",
        message,
    };
    if !theta.is_finite() {
        return Err(invalid(format!("{theta} is not a finite angle")));
    }
    if theta >= FRAC_PI_4 {
        return Err(invalid(format!(
            "degenerate parameters: theta = {theta} is not below pi/4, where α²−β² = 0"
        )));
    }
    if theta <= 0.0 {
        return Err(invalid(format!(
            "degenerate parameters: theta = {theta} is not above 0, where 2αβ = 0"
        )));
    }
    ProtocolParams::from_theta(theta).map_err(|e| invalid(e.to_string()))
}
