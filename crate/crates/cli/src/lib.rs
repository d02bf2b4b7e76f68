//! Command-line front end for `qka-core`: argument parsing, campaign
//! execution and deterministic JSON or text reports.

pub mod config;
pub mod report;
pub mod run;

use std::path::PathBuf;

pub use config::{parse_args, Command, Format, RunConfig};
pub use run::execute;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(Box<clap::Error>),

    #[error("invalid value for {flag}: {message}")]
    InvalidArg { flag: &'static str, message: String },

    #[error("the attack command needs --target")]
    MissingTarget,

    #[error(transparent)]
    Core(#[from] qka_core::Error),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for usage mistakes, 2 for failures inside the simulator.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            CliError::Usage(_) | CliError::InvalidArg { .. } | CliError::MissingTarget => 1,
            CliError::Core(_) | CliError::Io { .. } => 2,
        }
    }
}

/// The report in the configured format, newline terminated.
pub fn render(config: &RunConfig, report: &serde_json::Value) -> String {
    match config.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report values serialize");
            s.push('\n');
            s
        }
        Format::Text => report::to_text(report),
    }
}

/// Parses, executes and renders in one step.
pub fn run<I, T>(args: I) -> Result<(RunConfig, String), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = parse_args(args)?;
    let report = execute(&config)?;
    let text = render(&config, &report);
    Ok((config, text))
}
