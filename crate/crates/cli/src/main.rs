//! `ergolab`: run dynamics experiments from a JSON config and write a
//! deterministic report plus CSV tables.
//!
//! Exit codes: 0 = experiment completed (whatever the verdict), 2 = bad
//! config or usage.

mod config;
mod report;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::parse_config;

#[derive(Parser)]
#[command(name = "ergolab", version, about = "numerical experiments in topological dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.json and CSV tables.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Separated-set growth rates across scales.
    Entropy(RunArgs),
    /// Search for (or verify) a tracing certificate.
    Trace(RunArgs),
    /// Approximate product property over a parameter grid.
    App(RunArgs),
    /// Zero-mistake variant of the grid test.
    Sapp(RunArgs),
    /// Smallest uniform gap for zero-mistake periodic tracing.
    Spec(RunArgs),
    /// Convergence of empirical measures from several starts.
    UniqueErgodicity(RunArgs),
    /// Cluster long-run empirical measures.
    Cluster(RunArgs),
    /// Fixed/periodic point census for an interval map.
    IntervalClassify(RunArgs),
    /// Joint entropy / tracing / measure consistency check.
    Dichotomy(RunArgs),
}

impl Command {
    fn kind(&self) -> &'static str {
        match self {
            Command::Entropy(_) => "entropy",
            Command::Trace(_) => "trace",
            Command::App(_) => "app",
            Command::Sapp(_) => "sapp",
            Command::Spec(_) => "spec",
            Command::UniqueErgodicity(_) => "unique-ergodicity",
            Command::Cluster(_) => "cluster",
            Command::IntervalClassify(_) => "interval-classify",
            Command::Dichotomy(_) => "dichotomy",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Entropy(a)
            | Command::Trace(a)
            | Command::App(a)
            | Command::Sapp(a)
            | Command::Spec(a)
            | Command::UniqueErgodicity(a)
            | Command::Cluster(a)
            | Command::IntervalClassify(a)
            | Command::Dichotomy(a) => a,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    let args = cli.command.args();

    let bytes = match std::fs::read(&args.config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match parse_config(&bytes) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if cfg.experiment.kind() != kind {
        eprintln!(
            "config error: subcommand `{kind}` does not match experiment kind `{}`",
            cfg.experiment.kind()
        );
        return ExitCode::from(2);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }

    let run = || match runner::execute(&cfg, &bytes, &args.out) {
        Ok(report) => {
            println!("{kind} [{}]: {}", report.system, report.verdict);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
    };

    // Pin the worker count when asked so output is reproducible across
    // machines; the algorithms are order-independent either way.
    match std::env::var("ERGOLAB_THREADS") {
        Ok(v) => {
            let threads: usize = match v.parse() {
                Ok(t) if t > 0 => t,
                _ => {
                    eprintln!("config error: ERGOLAB_THREADS must be a positive integer");
                    return ExitCode::from(2);
                }
            };
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("config error: thread pool: {e}");
                    return ExitCode::from(2);
                }
            };
            pool.install(run)
        }
        Err(_) => run(),
    }
}
