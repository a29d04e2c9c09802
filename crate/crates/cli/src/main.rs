use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use holoext::commands::Command;

#[derive(Debug, Parser)]
#[command(name = "holoext", version, about = "Verify extension and restriction bounds for weighted function spaces")]
struct Args {
    command: Command,
    #[arg(long, env = "HOLOEXT_CONFIG")]
    config: PathBuf,
    #[arg(long, env = "HOLOEXT_OUT", default_value = "out")]
    out: PathBuf,
    /// Overrides `seed` from the config.
    #[arg(long, env = "HOLOEXT_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "HOLOEXT_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match holoext::load_config(&args.config, args.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match holoext::execute(args.command, &config, &args.out, args.threads) {
        Ok(outcome) => {
            for c in &outcome.checks {
                let slack = c.slack.map(|s| format!(" slack={s:.3e}")).unwrap_or_default();
                let flags = if c.flags.is_empty() { String::new() } else { format!(" [{}]", c.flags.join(",")) };
                println!("{} {}{slack}{flags}", if c.pass { "PASS" } else { "FAIL" }, c.name);
            }
            if outcome.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
