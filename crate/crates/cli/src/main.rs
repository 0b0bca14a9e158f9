use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use eduequity::pipeline::{self, PipelineConfig, Stage};
use eduequity::reranker::OracleInstance;

#[derive(Debug, Parser)]
#[command(
    name = "eduequity",
    version,
    about = "Educational-principle evaluation and re-ranking of course recommendations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the pipeline: load or generate data, split, score, re-rank and write reports.
    Run {
        /// JSON pipeline config; built-in defaults when omitted.
        #[arg(long, env = "EDUEQ_CONFIG")]
        config: Option<PathBuf>,
        /// Root seed, overriding the config.
        #[arg(long, env = "EDUEQ_SEED")]
        seed: Option<u64>,
        /// Report directory, overriding the config.
        #[arg(long, env = "EDUEQ_OUT")]
        out: Option<PathBuf>,
        /// Comma-separated stages: baseline, sweep, scores.
        #[arg(
            long,
            env = "EDUEQ_STAGES",
            value_delimiter = ',',
            default_value = "baseline,sweep"
        )]
        stages: Vec<Stage>,
    },
    /// Compare greedy re-ranking against the exhaustive optimum on a small instance.
    Oracle {
        /// JSON instance with at most 12 candidates.
        instance: PathBuf,
    },
    /// Print the built-in default config as JSON.
    DefaultConfig,
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn run(
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    stages: Vec<Stage>,
) -> Result<()> {
    let mut cfg = match &config {
        Some(path) => PipelineConfig::load(path).context("config stage failed")?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    let stages: BTreeSet<Stage> = stages.into_iter().collect();
    let report = pipeline::run(&cfg, &stages)?;
    if let Some(s) = report.split_stats {
        eprintln!(
            "split: {} learners, {} courses, {} interactions",
            s.learners, s.courses, s.interactions
        );
    }
    for (label, n) in report.skipped.iter().filter(|(_, n)| **n > 0) {
        eprintln!(
            "{label}: skipped {n} learners with fewer than {} candidates",
            cfg.rerank.k
        );
    }
    for path in pipeline::write_reports(&report, &cfg.output_dir, &stages)? {
        emit(&path.display().to_string())?;
    }
    Ok(())
}

fn oracle(instance: PathBuf) -> Result<()> {
    let inst = OracleInstance::load(&instance)?;
    let report = inst.run()?;
    emit(&serde_json::to_string_pretty(&report)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            out,
            stages,
        } => run(config, seed, out, stages),
        Command::Oracle { instance } => oracle(instance),
        Command::DefaultConfig => serde_json::to_string_pretty(&PipelineConfig::default())
            .map_err(Into::into)
            .and_then(|s| emit(&s)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
