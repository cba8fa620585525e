//! Thin experiment runner: each subcommand names an experiment, `--config`
//! supplies its JSON parameters, and results land in `--out` as `runs.csv`
//! plus `summary.json`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dynsel::error::{Error, Result};
use dynsel::experiments::{run_experiment, schema_text, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "dynsel", about = "online selection experiment runner", version)]
struct Cli {
    /// Print the runs.csv column documentation and exit.
    #[arg(long)]
    schema: bool,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for runs.csv and summary.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Run seeds 0..n (shifted by --seed-offset) instead of the config list.
    #[arg(long)]
    seeds: Option<u64>,
    /// Offset added to every seed.
    #[arg(long, default_value_t = 0)]
    seed_offset: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Empirical selectability of a greedy scheme against its constant.
    Selectability(RunArgs),
    /// Run the temporal wrapper and report selection statistics.
    TemporalReduction(RunArgs),
    /// Batched bipartite matching with reusable machines vs the LP bound.
    MatchingAppendixB(RunArgs),
    /// Full-feedback regret sweep over horizons.
    RegretFull(RunArgs),
    /// Semi-bandit regret sweep with importance-weighted estimates.
    RegretOsmd(RunArgs),
    /// Blocked-exploration semi-bandit regret sweep.
    RegretBlocked(RunArgs),
    /// Fair-coin adaptivity-gap demonstration.
    LowerboundC1(RunArgs),
    /// Geometric single-spike benchmark-gap demonstration.
    LowerboundC2(RunArgs),
    /// Print the runs.csv column documentation.
    Schema,
}

impl Cmd {
    fn experiment_name(&self) -> &'static str {
        match self {
            Cmd::Selectability(_) => "selectability",
            Cmd::TemporalReduction(_) => "temporal-reduction",
            Cmd::MatchingAppendixB(_) => "matching-appendix-b",
            Cmd::RegretFull(_) => "regret-full",
            Cmd::RegretOsmd(_) => "regret-osmd",
            Cmd::RegretBlocked(_) => "regret-blocked",
            Cmd::LowerboundC1(_) => "lowerbound-c1",
            Cmd::LowerboundC2(_) => "lowerbound-c2",
            Cmd::Schema => "schema",
        }
    }

    fn args(&self) -> Option<&RunArgs> {
        match self {
            Cmd::Selectability(a)
            | Cmd::TemporalReduction(a)
            | Cmd::MatchingAppendixB(a)
            | Cmd::RegretFull(a)
            | Cmd::RegretOsmd(a)
            | Cmd::RegretBlocked(a)
            | Cmd::LowerboundC1(a)
            | Cmd::LowerboundC2(a) => Some(a),
            Cmd::Schema => None,
        }
    }
}

fn resolve_seeds(args: &RunArgs, config: &ExperimentConfig) -> Result<Vec<u64>> {
    if let Some(n) = args.seeds {
        if n == 0 {
            return Err(Error::config("--seeds must be positive"));
        }
        return Ok((args.seed_offset..args.seed_offset + n).collect());
    }
    match &config.seeds {
        Some(list) if !list.is_empty() => {
            Ok(list.iter().map(|s| s + args.seed_offset).collect())
        }
        _ => Err(Error::config("provide a nonempty seed list in the config or pass --seeds")),
    }
}

fn run(cmd: &Cmd) -> Result<()> {
    let Some(args) = cmd.args() else {
        print!("{}", schema_text());
        return Ok(());
    };
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::config(format!("reading {}: {e}", args.config.display())))?;
    let config = ExperimentConfig::parse(&text)?;
    if config.spec.name() != cmd.experiment_name() {
        return Err(Error::config(format!(
            "config describes experiment {:?} but the {:?} subcommand was invoked",
            config.spec.name(),
            cmd.experiment_name()
        )));
    }
    let opts = RunOptions { out_dir: args.out.clone(), seeds: resolve_seeds(args, &config)? };
    let summary = run_experiment(&config, &opts)?;
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = if cli.schema {
        Cmd::Schema
    } else if let Some(cmd) = cli.cmd {
        cmd
    } else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(1);
    };
    match run(&cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Parse(msg)) => {
            eprintln!("parse error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
