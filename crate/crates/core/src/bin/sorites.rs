use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sorites_core::scenario::{run, Format, RunOptions};

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

/// Analyze a response-system scenario and print a report.
#[derive(Parser)]
#[command(name = "sorites", version)]
struct Args {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Seed for stochastic scenarios; overrides the scenario's own.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of minimal covers to enumerate; overrides the
    /// scenario's own. Falls back to 2^20.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Suppress diagnostics on stderr.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let fail = |code: i32, msg: &str| {
        if !args.quiet {
            eprintln!("sorites: {msg}");
        }
        ExitCode::from(code as u8)
    };
    let text = match std::fs::read_to_string(&args.scenario) {
        Ok(t) => t,
        Err(e) => return fail(2, &format!("cannot read {}: {e}", args.scenario.display())),
    };
    let base = args
        .scenario
        .parent()
        .map(PathBuf::from)
        .unwrap_or_default();
    let opts = RunOptions {
        seed: args.seed,
        budget: args.budget,
    };
    match run(&text, &base, &opts) {
        Ok(report) => {
            let format = match args.format {
                OutputFormat::Json => Format::Json,
                OutputFormat::Text => Format::Text,
            };
            let mut out = std::io::stdout().lock();
            if out
                .write_all(report.render(format).as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return fail(1, "cannot write report");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.exit_code(), &e.to_string()),
    }
}
