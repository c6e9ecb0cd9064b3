//! Command-line front end: run, analyze, compare, suite.
//!
//! Exit codes, by failure class:
//!   0  converged / comparison passed / all criteria passed
//!   1  configuration or input errors (bad flags, bad config file,
//!      unknown instance, unreadable paths, dependent generators)
//!   2  the iteration ended without converging (MaxIters or Stalled)
//!   3  a check failed (suite criterion, or compare beyond tolerance)
//!   4  operation not applicable (overlapping supports, unsupported shape)
//!   5  non-finite iterate

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use altproj::apm_engine::TerminalStatus;
use altproj::harness::{
    compare_solvers, find, run_configured, run_suite, suite_summary_json, write_run_artifacts,
    RunConfig, StartSpec, SuiteOptions, TRUNCATION_DEFAULT,
};
use altproj::structure::analyze;
use altproj::tol::EPS_SUPP_DEFAULT;
use altproj::{Error, Result};

#[derive(Parser)]
#[command(
    name = "altproj",
    version,
    about = "Alternating projections between a finite-codimension subspace \
             and the nonnegative cone in truncated l2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance; write trace.csv, plot.csv, report.json,
    /// snapshots.json.
    Run(RunArgs),
    /// Print the structure analyzer's JSON report for an instance.
    Analyze {
        /// Catalog instance id.
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = TRUNCATION_DEFAULT)]
        truncation: usize,
    },
    /// Run the direct and the decomposition solver side by side on a
    /// disjoint-support instance and report the largest deviation.
    Compare {
        /// Catalog instance id.
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = TRUNCATION_DEFAULT)]
        truncation: usize,
    },
    /// Execute the acceptance suite, one line per criterion.
    Suite {
        /// Also write the JSON summary here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap every solver run's iteration budget.
        #[arg(long)]
        max_iters: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Catalog instance id (alternative to --config).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    instance: Option<String>,
    /// JSON run-config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start override: "zero", "e<K>", "random:<SEED>", or a StartSpec
    /// JSON object.
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    truncation: Option<usize>,
    /// Stopping tolerance on dist_to_A + dist_to_B + step_delta.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Output directory (default: the config's out_dir, else out/<id>).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep clap's rendering but fold usage errors into the config
            // class; clap's own exit code (2) is taken by non-convergence.
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            e.print().expect("stderr is writable");
            return ExitCode::from(if is_help { 0 } else { 1 });
        }
    };
    let code = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Analyze { instance, truncation } => cmd_analyze(&instance, truncation),
        Command::Compare { instance, truncation } => cmd_compare(&instance, truncation),
        Command::Suite { out, max_iters } => cmd_suite(out, max_iters),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_class(&e))
        }
    }
}

/// Print a line, tolerating a closed stdout (e.g. piping into `head`).
fn say(line: impl AsRef<str>) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{}", line.as_ref());
}

fn exit_class(error: &Error) -> u8 {
    match error {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::NotFound(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::DependentFamily { .. } => 1,
        Error::PreconditionViolated(_) | Error::Unsupported(_) | Error::NotFeasiblePoint { .. } => {
            4
        }
        Error::NonFiniteIterate { .. } => 5,
    }
}

fn parse_start(text: &str) -> Result<StartSpec> {
    if text == "zero" {
        return Ok(StartSpec::Zero);
    }
    if let Some(index) = text.strip_prefix('e').and_then(|d| d.parse::<u64>().ok()) {
        return Ok(StartSpec::Unit { index });
    }
    if let Some(seed) = text.strip_prefix("random:").and_then(|d| d.parse::<u64>().ok()) {
        return Ok(StartSpec::RandomNonneg {
            seed,
            support: altproj::harness::RANDOM_SUPPORT_DEFAULT,
        });
    }
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| Error::Config(format!("start spec: {e}")));
    }
    Err(Error::Config(format!(
        "start spec {text:?} is not \"zero\", \"e<K>\", \"random:<SEED>\", or JSON"
    )))
}

fn cmd_run(args: RunArgs) -> Result<u8> {
    let mut config = match (&args.instance, &args.config) {
        (Some(id), None) => RunConfig::for_instance(id),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            RunConfig::from_json_str(&text)?
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    if let Some(text) = &args.start {
        config.start = Some(parse_start(text)?);
    }
    if let Some(n) = args.truncation {
        config.truncation = n;
    }
    if let Some(tol) = args.tol {
        config.tol_residual = tol;
    }
    if let Some(m) = args.max_iters {
        config.max_iters = m;
    }
    config.validate()?;

    let outcome = run_configured(&config)?;
    let dir = args
        .out
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&outcome.id));
    write_run_artifacts(&outcome, &dir)?;

    let solver = if outcome.used_decomposition { "decomposition" } else { "direct" };
    say(format!(
        "{}: {:?} after {} iterations, final residual {:.3e} ({} solver, truncation {})",
        outcome.id,
        outcome.trace.terminal_status,
        outcome.trace.iterations(),
        outcome.trace.final_residual(),
        solver,
        outcome.truncation,
    ));
    say(format!("wrote {}", dir.display()));
    Ok(match outcome.trace.terminal_status {
        TerminalStatus::Converged => 0,
        TerminalStatus::MaxIters | TerminalStatus::Stalled => 2,
    })
}

fn cmd_analyze(id: &str, truncation: usize) -> Result<u8> {
    let entry = find(id)?;
    let basis = entry.basis(truncation)?;
    let report = analyze(&basis, EPS_SUPP_DEFAULT, truncation as u64)?;
    say(serde_json::to_string_pretty(&report.to_json())?);
    Ok(0)
}

fn cmd_compare(id: &str, truncation: usize) -> Result<u8> {
    let report = compare_solvers(id, truncation)?;
    say(format!(
        "{}: {} steps compared, max entrywise deviation {:.3e} -> {}",
        report.id,
        report.steps_compared,
        report.max_deviation,
        if report.pass { "pass" } else { "FAIL" },
    ));
    Ok(if report.pass { 0 } else { 3 })
}

fn cmd_suite(out: Option<PathBuf>, max_iters: Option<usize>) -> Result<u8> {
    let results = run_suite(&SuiteOptions { max_iters });
    for result in &results {
        say(result.line());
    }
    let summary = suite_summary_json(&results);
    if let Some(path) = out {
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        say(format!("wrote {}", path.display()));
    }
    let all_passed = results.iter().all(|r| r.passed);
    if !all_passed {
        let failed: Vec<String> = results
            .iter()
            .filter(|r| !r.passed)
            .map(|r| format!("{} ({})", r.index, r.name))
            .collect();
        eprintln!("failed criteria: {}", failed.join(", "));
    }
    Ok(if all_passed { 0 } else { 3 })
}
