//! `jhj`: command-line driver for the junction Hamilton-Jacobi toolkit.
//!
//! Every run writes `manifest.json` into the output directory, including
//! runs that fail; failures also print a JSON error object on stderr and
//! exit with 2 (configuration), 3 (numerical) or 4 (I/O).

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::commands::Outcome;
use crate::config::{parse_config, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "jhj", version, about = "Hamilton-Jacobi equations on multi-dimensional junctions")]
struct Cli {
    /// TOML or JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: `output_dir` from the config, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for data-parallel loops.
    #[arg(long, global = true, env = "JHJ_THREADS")]
    threads: Option<usize>,
    /// Seed of the sampled checks (overrides `seed` from the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Effective flux limiters.
    #[command(subcommand)]
    Limiter(LimiterCommand),
    /// Vertex test function.
    #[command(subcommand)]
    Vtf(VtfCommand),
    /// Runs the junction solver and writes one CSV per snapshot.
    Solve,
    /// Two-domain problems.
    #[command(subcommand)]
    Ishii(IshiiCommand),
    /// Reference solutions.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Subcommand)]
enum LimiterCommand {
    /// Tabulates `A_0` and the effective limiter of the junction condition.
    Reduce,
}

#[derive(Debug, Subcommand)]
enum VtfCommand {
    /// Evaluates the configured pairs.
    Eval,
    /// Sampled residual, diagonal and growth checks.
    Check,
}

#[derive(Debug, Subcommand)]
enum IshiiCommand {
    /// Ishii limiters and the two extremal solutions.
    Compare,
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Hopf-Lax formula on the whole space.
    HopfLax,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Limiter(LimiterCommand::Reduce) => "limiter reduce",
            Command::Vtf(VtfCommand::Eval) => "vtf eval",
            Command::Vtf(VtfCommand::Check) => "vtf check",
            Command::Solve => "solve",
            Command::Ishii(IshiiCommand::Compare) => "ishii compare",
            Command::Oracle(OracleCommand::HopfLax) => "oracle hopf-lax",
        }
    }
}

struct Run {
    config_hash: Option<String>,
    seed: u64,
    threads: Option<usize>,
    timings: Map<String, Value>,
}

fn load(cli: &Cli, run: &mut Run) -> Result<RunConfig, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::config("", "no --config given"))?;
    let bytes = fs::read(path).map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))?;
    run.config_hash = Some(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect());
    let text = String::from_utf8(bytes).map_err(|_| CliError::config("", "configuration is not UTF-8"))?;
    parse_config(&text, Some(path))
}

fn execute(cli: &Cli, cfg: &RunConfig, out: &Path, run: &mut Run) -> Result<Outcome, CliError> {
    run.seed = cli.seed.or(cfg.seed).unwrap_or(0);
    run.threads = cli.threads.or(cfg.threads);
    if let Some(n) = run.threads {
        if n == 0 {
            return Err(CliError::config("threads", "must be positive"));
        }
        // a second initialisation in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Limiter(LimiterCommand::Reduce) => commands::limiter_reduce(cfg, out),
        Command::Vtf(VtfCommand::Eval) => commands::vtf_eval(cfg, out),
        Command::Vtf(VtfCommand::Check) => commands::vtf_check(cfg, out, run.seed),
        Command::Solve => commands::run_solve(cfg, out),
        Command::Ishii(IshiiCommand::Compare) => commands::ishii_compare(cfg, out),
        Command::Oracle(OracleCommand::HopfLax) => commands::oracle_hopf_lax(cfg, out),
    }
}

fn millis(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut run = Run { config_hash: None, seed: 0, threads: None, timings: Map::new() };

    let loaded = load(&cli, &mut run);
    run.timings.insert("parse_ms".into(), json!(millis(start)));
    let out = cli
        .out
        .clone()
        .or_else(|| loaded.as_ref().ok().and_then(|c| c.output_dir.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let ran = Instant::now();
    let result = loaded.and_then(|cfg| {
        fs::create_dir_all(&out).map_err(|e| CliError::io(format!("creating {}: {e}", out.display())))?;
        execute(&cli, &cfg, &out, &mut run)
    });
    run.timings.insert("run_ms".into(), json!(millis(ran)));
    run.timings.insert("total_ms".into(), json!(millis(start)));

    let mut manifest = json!({
        "command": cli.command.name(),
        "config": cli.config.as_ref().map(|p| p.display().to_string()),
        "config_hash": run.config_hash,
        "seed": run.seed,
        "threads": run.threads,
        "versions": { "jhj-cli": env!("CARGO_PKG_VERSION"), "jhj-core": env!("CARGO_PKG_VERSION") },
        "timings": run.timings,
    });
    let code = match &result {
        Ok(outcome) => {
            manifest["status"] = json!("ok");
            manifest["outputs"] = json!(outcome.files);
            for (k, v) in &outcome.extra {
                manifest[k] = v.clone();
            }
            0
        }
        Err(e) => {
            manifest["status"] = json!("error");
            manifest["error"] = json!(e);
            eprintln!("{}", json!({ "error": e }));
            e.kind.exit_code()
        }
    };
    let written = fs::create_dir_all(&out)
        .and_then(|_| fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest).unwrap() + "\n"));
    if let Err(e) = written {
        eprintln!("{}", json!({ "error": CliError::io(format!("writing manifest: {e}")) }));
        return ExitCode::from(4);
    }
    ExitCode::from(code as u8)
}
