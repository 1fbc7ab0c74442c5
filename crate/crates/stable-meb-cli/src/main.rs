//! Command-line harness: dataset generation, algorithm trials, statistical
//! evaluation, and parameter sweeps over enclosing-ball experiments.

mod eval;
mod gen;
mod run;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "stable-meb", version, about = "Sub-linear enclosing-ball experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset file plus its JSON sidecar.
    Gen(gen::GenArgs),
    /// Run trials of one algorithm, emitting one JSON report line per trial.
    Run(run::RunArgs),
    /// Aggregate report lines against frequency criteria; exit 0 iff they pass.
    Eval(eval::EvalArgs),
    /// Cartesian sweep over epsilon/beta/gamma lists.
    Sweep(run::SweepArgs),
}

/// Algorithm parameters shared by `run` and `sweep`.
#[derive(Args, Clone, Debug)]
pub struct CfgArgs {
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Stability lower bound of the instance (user-supplied).
    #[arg(long, default_value_t = 0.05)]
    pub beta: f64,
    /// Outlier fraction, used by the outlier algorithm.
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eta0: f64,
    /// Center-accuracy share in (0, 1).
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_net: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_hit: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_out: f64,
}

/// Worker-pool size: `STABLE_MEB_THREADS` caps the available parallelism.
pub fn thread_cap(trials: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cap = std::env::var("STABLE_MEB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(available);
    cap.min(available).min(trials).max(1)
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen::main(args),
        Command::Run(args) => run::run_main(args),
        Command::Eval(args) => eval::main(args),
        Command::Sweep(args) => run::sweep_main(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(err.downcast_ref::<eval::EvalFailure>().map_or(1, |f| f.exit_code));
    }
}
