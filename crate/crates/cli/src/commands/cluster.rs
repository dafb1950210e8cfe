use std::fmt::Write as _;
use std::time::Instant;

use clap::Args;
use mmm_core::cluster::{fit_k, FitOptions, Init};
use mmm_core::select::{fit_sweep, SweepOptions};
use mmm_core::{Error, Result};

use crate::commands::{CommonArgs, EstimatorArgs, PriorArgs};
use crate::report::{ensure_out_dir, out_path, write_assignments, RunConfig};

#[derive(Args, Debug)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Fixed number of clusters (mutually exclusive with --select).
    #[arg(long, conflicts_with_all = ["select", "kmax"])]
    pub k: Option<usize>,
    /// Selection criterion: exact, am, hm, hmbeta, ti, or bic.
    #[arg(long, requires = "kmax")]
    pub select: Option<String>,
    /// Largest K to consider when sweeping.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Random restarts for fixed-K fits (best final likelihood wins).
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Reassignment-pass cap per fit.
    #[arg(long, default_value_t = 200)]
    pub max_passes: usize,
    /// Score all rows against pass-start statistics and move them together.
    #[arg(long)]
    pub batch_mode: bool,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[command(flatten)]
    pub priors: PriorArgs,
}

pub fn run(args: ClusterArgs) -> Result<()> {
    let started = Instant::now();
    ensure_out_dir(&args.common.out)?;
    let (_, data) = args.common.load()?;
    let priors = args.priors.priors_for(&data)?;
    let fit = FitOptions {
        max_passes: args.max_passes,
        n_restarts: args.restarts,
        batch_mode: args.batch_mode,
        ..FitOptions::default()
    };

    let mut config = RunConfig::new("cluster");
    config.set("data", args.common.data.display());
    config.set("schema", args.common.schema.display());
    config.set("seed", args.common.seed);
    config.set("standardize", !args.common.no_standardize);
    config.set("impute", args.common.impute);
    config.set("restarts", args.restarts);
    config.set("max_passes", args.max_passes);
    config.set("batch_mode", args.batch_mode);
    config.set("threads", args.common.effective_threads());
    args.priors.record(&mut config);

    let mut report = String::from(
        "k,log_lik,converged,passes,criterion,criterion_value,std_error,n_samples,chosen\n",
    );

    match (args.k, args.select.as_deref(), args.kmax) {
        (Some(k), None, None) => {
            config.set("k", k);
            let result = fit_k(&data, &priors, k, Init::Random, args.common.seed, &fit)?;
            write_assignments(
                &out_path(&args.common.out, "assignments.csv"),
                result.state.assignment(),
            )?;
            let _ = writeln!(
                report,
                "{},{},{},{},,,,,true",
                result.state.k(),
                result.log_lik(),
                result.converged,
                result.passes
            );
            std::fs::write(out_path(&args.common.out, "report.csv"), report)?;
            config.write_to(&args.common.out)?;
            println!(
                "fitted K = {} (log likelihood {})",
                result.state.k(),
                result.log_lik()
            );
        }
        (None, Some(method), Some(kmax)) => {
            let selection = args.estimator.selection(method)?;
            config.set("select", method);
            config.set("kmax", kmax);
            args.estimator.record(&mut config, &selection);
            let sweep = fit_sweep(
                &data,
                &priors,
                kmax,
                args.common.seed,
                &SweepOptions {
                    selection,
                    fit,
                    threads: args.common.effective_threads(),
                },
            )?;
            let chosen = &sweep.results[sweep.chosen_k - 1];
            write_assignments(
                &out_path(&args.common.out, "assignments.csv"),
                chosen.state.assignment(),
            )?;
            for (result, estimate) in sweep.results.iter().zip(&sweep.estimates) {
                let _ = writeln!(
                    report,
                    "{},{},{},{},{},{},{},{},{}",
                    estimate.k,
                    result.log_lik(),
                    result.converged,
                    result.passes,
                    estimate.estimator.as_str(),
                    estimate.log_ml,
                    estimate
                        .mc_std_error
                        .map(|s| s.to_string())
                        .unwrap_or_default(),
                    estimate.n_samples,
                    estimate.k == sweep.chosen_k
                );
            }
            std::fs::write(out_path(&args.common.out, "report.csv"), report)?;
            config.write_to(&args.common.out)?;
            println!("chosen K = {}", sweep.chosen_k);
        }
        _ => {
            return Err(Error::InvalidArgument(
                "pass either --k K or --select METHOD --kmax K".into(),
            ))
        }
    }
    eprintln!("cluster finished in {} ms", started.elapsed().as_millis());
    Ok(())
}
