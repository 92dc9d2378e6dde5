//! The `hpppt` command line: instance generation, single solves, benchmark
//! grids and simulated search missions.
//!
//! Every command is deterministic in its arguments. Apart from the wall-time
//! fields, rerunning a command reproduces its output byte for byte.

pub mod bench;
pub mod gen;
pub mod missions;
pub mod output;
pub mod solvers;
pub mod lists;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

/// Default per-run time limit, seconds.
pub const DEFAULT_TIME_LIMIT_SECS: f64 = 60.0;

#[derive(Debug, Parser)]
#[command(name = "hpppt", version, about = "Expected-cost Hamiltonian paths with probabilistic terminals")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Base seed for every random choice a command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Per-run time limit in seconds (per plan inside missions).
    #[arg(
        long,
        global = true,
        env = "HPPPT_TIME_LIMIT_SECS",
        default_value_t = DEFAULT_TIME_LIMIT_SECS
    )]
    pub time_limit: f64,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file (a directory for `gen`); standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn time_limit(&self) -> anyhow::Result<Duration> {
        Duration::try_from_secs_f64(self.time_limit)
            .ok()
            .filter(|d| !d.is_zero())
            .ok_or_else(|| anyhow::anyhow!("--time-limit must be a positive number of seconds"))
    }

    pub fn pool(&self) -> anyhow::Result<rayon::ThreadPool> {
        Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.unwrap_or(0))
            .build()?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write seeded random instances for a sweep of sizes.
    Gen(gen::GenArgs),
    /// Solve one instance and print a JSON record.
    Solve(solvers::SolveArgs),
    /// Run a solver x instance x repetition grid and write CSV rows.
    Bench(bench::BenchArgs),
    /// Lifelong target search with a noisy sensor on a fixed graph.
    Lifelong(missions::LifelongArgs),
    /// Target search in an initially unknown grid world.
    Explore(missions::ExploreArgs),
}

/// Whether every run ended in an accepted status.
pub type Clean = bool;

pub fn run(cli: Cli) -> anyhow::Result<Clean> {
    let g = &cli.global;
    match cli.command {
        Command::Gen(a) => gen::run(g, &a),
        Command::Solve(a) => solvers::run_solve(g, &a),
        Command::Bench(a) => bench::run(g, &a),
        Command::Lifelong(a) => missions::run_lifelong(g, &a),
        Command::Explore(a) => missions::run_explore(g, &a),
    }
}

/// Parses arguments and runs a command. Exit status 0 means every run
/// finished ok or timed out, 1 that some run failed, and 2 a usage or
/// configuration error.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
