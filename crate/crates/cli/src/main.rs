//! Batch front door for the refutation workbench.
//!
//! Subcommands: refute, phase2, ldlr, ldlr-mc, pseudocal, distinguish,
//! replay. Every run is seeded (`--seed`, falling back to the
//! `POLYREFUTE_SEED` environment variable) and can emit a replayable JSON
//! record. Exit codes: 0 success, 2 negative/not-found result or drift,
//! 3 degenerate input, 64 usage error.

mod commands;
mod record;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::time::Instant;

use commands::*;
use record::{build_id, first_difference, RunRecord, SCHEMA_VERSION};

const EXIT_NEGATIVE: i32 = 2;
const EXIT_DEGENERATE: i32 = 3;
const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "polyrefute", version, about = "Refutation workbench for random polynomial systems")]
struct Cli {
    /// Cap on worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write a replayable run record here.
    #[arg(long, global = true)]
    record: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find and verify an exact Nullstellensatz refutation of a random
    /// nice-rational system.
    Refute(RefuteConfig),
    /// Sweep the degree-2 SDP feasibility phase transition.
    Phase2(Phase2Config),
    /// Closed-form truncated low-degree likelihood-ratio norm.
    Ldlr(LdlrConfig),
    /// Monte-Carlo oracle for the likelihood-ratio coefficients.
    LdlrMc(LdlrMcConfig),
    /// Pseudo-calibrated degree-4 moment matrix, repair, and spectrum.
    Pseudocal(PseudocalConfig),
    /// Spectral distinguisher separation experiment.
    Distinguish(DistinguishConfig),
    /// Re-run a recorded experiment and demand identical results.
    Replay {
        /// Record written by a previous run.
        path: PathBuf,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            eprintln!("warning: could not cap worker threads: {e}");
        }
    }
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            // Precondition violations are usage errors; anything else is a
            // degenerate input or internal failure.
            let msg = err.to_string();
            let code = if msg.contains("invalid parameter") || msg.contains("must be") {
                EXIT_USAGE
            } else {
                EXIT_DEGENERATE
            };
            std::process::exit(code);
        }
    }
}

fn resolve_seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| {
            std::env::var("POLYREFUTE_SEED")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0)
}

fn run(cli: Cli) -> Result<i32> {
    let started = Instant::now();
    let (name, config_value, outcome) = match &cli.command {
        Command::Refute(config) => {
            let seed = resolve_seed(config.seed);
            let mut config = config.clone();
            config.seed = Some(seed);
            (
                "refute",
                serde_json::to_value(&config)?,
                run_refute(&config, seed, true)?,
            )
        }
        Command::Phase2(config) => {
            let seed = resolve_seed(config.seed);
            let mut config = config.clone();
            config.seed = Some(seed);
            (
                "phase2",
                serde_json::to_value(&config)?,
                run_phase2(&config, seed, true)?,
            )
        }
        Command::Ldlr(config) => {
            let seed = resolve_seed(config.seed);
            let mut config = config.clone();
            config.seed = Some(seed);
            (
                "ldlr",
                serde_json::to_value(&config)?,
                run_ldlr(&config, seed, true)?,
            )
        }
        Command::LdlrMc(config) => {
            let seed = resolve_seed(config.base.seed);
            let mut config = config.clone();
            config.base.seed = Some(seed);
            (
                "ldlr-mc",
                serde_json::to_value(&config)?,
                run_ldlr_mc(&config, seed, true)?,
            )
        }
        Command::Pseudocal(config) => {
            let seed = resolve_seed(config.seed);
            let mut config = config.clone();
            config.seed = Some(seed);
            (
                "pseudocal",
                serde_json::to_value(&config)?,
                run_pseudocal(&config, seed, true)?,
            )
        }
        Command::Distinguish(config) => {
            let seed = resolve_seed(config.seed);
            let mut config = config.clone();
            config.seed = Some(seed);
            (
                "distinguish",
                serde_json::to_value(&config)?,
                run_distinguish(&config, seed, true)?,
            )
        }
        Command::Replay { path } => return replay(path),
    };

    if let Some(path) = &cli.record {
        let record = RunRecord {
            schema_version: SCHEMA_VERSION,
            subcommand: name.to_string(),
            config: config_value,
            build_id: build_id(),
            wall_time_secs: started.elapsed().as_secs_f64(),
            results: outcome.results.clone(),
            summary: outcome.summary.clone(),
        };
        record.save(path)?;
    }
    Ok(outcome.exit)
}

/// Reruns a record's config and compares results field by field. All
/// pipelines are seeded and use deterministic reductions, so replay demands
/// exact equality.
fn replay(path: &Path) -> Result<i32> {
    let record = RunRecord::load(path)?;
    if record.schema_version != SCHEMA_VERSION {
        anyhow::bail!("unsupported record schema {}", record.schema_version);
    }
    let rerun = rerun_from_config(&record.subcommand, &record.config)?;
    match first_difference(&record.results, &rerun.results, "results") {
        None => {
            println!("replay of {} matches: no drift", record.subcommand);
            Ok(0)
        }
        Some(diff) => {
            eprintln!("replay drift in {}: {diff}", record.subcommand);
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn rerun_from_config(subcommand: &str, config: &Value) -> Result<CommandResult> {
    match subcommand {
        "refute" => {
            let config: RefuteConfig = serde_json::from_value(config.clone())?;
            let seed = resolve_seed(config.seed);
            run_refute(&config, seed, false)
        }
        "phase2" => {
            let config: Phase2Config = serde_json::from_value(config.clone())?;
            let seed = resolve_seed(config.seed);
            run_phase2(&config, seed, false)
        }
        "ldlr" => {
            let config: LdlrConfig = serde_json::from_value(config.clone())?;
            let seed = resolve_seed(config.seed);
            run_ldlr(&config, seed, false)
        }
        "ldlr-mc" => {
            let config: LdlrMcConfig = serde_json::from_value(config.clone())?;
            let seed = resolve_seed(config.base.seed);
            run_ldlr_mc(&config, seed, false)
        }
        "pseudocal" => {
            let config: PseudocalConfig = serde_json::from_value(config.clone())?;
            let seed = resolve_seed(config.seed);
            run_pseudocal(&config, seed, false)
        }
        "distinguish" => {
            let config: DistinguishConfig = serde_json::from_value(config.clone())?;
            let seed = resolve_seed(config.seed);
            run_distinguish(&config, seed, false)
        }
        other => anyhow::bail!("unknown subcommand in record: {other}"),
    }
}
