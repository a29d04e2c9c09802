//! Command-line front end: configuration, command runners and report files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

use serde_json::json;

use commands::{Command, Context};
use config::RunConfig;
use error::CliError;
use output::{Check, Outcome};

/// Run `command` and write its report into `out_dir`.
///
/// A math error inside the run becomes a single failing `error` check, so
/// the returned outcome always reflects what was written.
pub fn execute(
    command: Command,
    config: &RunConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<Outcome, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::semantic("threads", &e.to_string()))?;
    let outcome = pool.install(|| Context::new(config, config.seed).and_then(|ctx| commands::run(command, &ctx)));
    let outcome = outcome.unwrap_or_else(|e| {
        let mut o = Outcome::new(command.name());
        o.checks.push(Check::new("error", false).detail(json!({ "message": e.to_string() })));
        o
    });
    output::write_outcome(out_dir, &outcome, &config.digest(), config.seed)?;
    Ok(outcome)
}

/// Read, parse and validate a configuration file, applying a seed override.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    let mut config = RunConfig::parse(&text)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate()?;
    Ok(config)
}
