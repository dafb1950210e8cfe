use std::time::Instant;

use clap::Args;
use mmm_core::cluster::FitOptions;
use mmm_core::select::{fit_sweep, SweepOptions};
use mmm_core::Result;

use crate::commands::{CommonArgs, EstimatorArgs, PriorArgs};
use crate::report::{ensure_out_dir, out_path, write_estimates, RunConfig};

#[derive(Args, Debug)]
pub struct SelectKArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest K to consider.
    #[arg(long)]
    pub kmax: usize,
    /// Estimator: exact, am, hm, hmbeta, ti, or bic.
    #[arg(long, default_value = "hmbeta")]
    pub method: String,
    /// Random restarts for the underlying fits.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[command(flatten)]
    pub priors: PriorArgs,
}

pub fn run(args: SelectKArgs) -> Result<()> {
    let started = Instant::now();
    ensure_out_dir(&args.common.out)?;
    let (_, data) = args.common.load()?;
    let priors = args.priors.priors_for(&data)?;
    let selection = args.estimator.selection(&args.method)?;

    let mut config = RunConfig::new("select-k");
    config.set("data", args.common.data.display());
    config.set("schema", args.common.schema.display());
    config.set("seed", args.common.seed);
    config.set("standardize", !args.common.no_standardize);
    config.set("impute", args.common.impute);
    config.set("kmax", args.kmax);
    config.set("method", &args.method);
    config.set("restarts", args.restarts);
    config.set("threads", args.common.effective_threads());
    args.estimator.record(&mut config, &selection);
    args.priors.record(&mut config);

    let sweep = fit_sweep(
        &data,
        &priors,
        args.kmax,
        args.common.seed,
        &SweepOptions {
            selection,
            fit: FitOptions {
                n_restarts: args.restarts,
                ..FitOptions::default()
            },
            threads: args.common.effective_threads(),
        },
    )?;

    write_estimates(
        &out_path(&args.common.out, "estimates.csv"),
        &sweep.estimates,
        args.common.seed,
    )?;
    config.write_to(&args.common.out)?;
    println!("chosen K = {}", sweep.chosen_k);
    eprintln!("select-k finished in {} ms", started.elapsed().as_millis());
    Ok(())
}
