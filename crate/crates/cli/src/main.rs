//! `mmm` — clustering of heterogeneous tabular data, evidence-based choice
//! of the number of clusters, and cluster-wise synthetic data generation.

mod commands;
mod report;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "mmm",
    version,
    about = "Bayesian clustering of mixed categorical/numeric tables, evidence-based selection \
             of the number of clusters, and cluster-wise synthetic data generation",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a dataset at a fixed K or sweep K with a selection criterion.
    Cluster(commands::cluster::ClusterArgs),
    /// Estimate the evidence for each K and report the best one.
    SelectK(commands::select_k::SelectKArgs),
    /// Fit a generator on a dataset with a designated output column and
    /// sample a synthetic dataset of the same size.
    Synth(commands::synth::SynthArgs),
    /// Generate a synthetic clustering benchmark with ground-truth labels.
    GenBench(commands::gen_bench::GenBenchArgs),
    /// Evaluate clusterings (ARI) or train/test AUC protocols.
    Eval(commands::eval_cmd::EvalArgs),
}

fn exit_code(err: &mmm_core::Error) -> i32 {
    use mmm_core::Error;
    match err {
        Error::InvalidArgument(_) | Error::Budget(_) => 1,
        Error::Schema(_) | Error::Data(_) | Error::Io(_) => 2,
        Error::Numerical(_) => 3,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is a
            // usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Cluster(args) => commands::cluster::run(args),
        Command::SelectK(args) => commands::select_k::run(args),
        Command::Synth(args) => commands::synth::run(args),
        Command::GenBench(args) => commands::gen_bench::run(args),
        Command::Eval(args) => commands::eval_cmd::run(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
