use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use mmm_core::cluster::FitOptions;
use mmm_core::data::write_csv;
use mmm_core::synth::{
    fit_generator, load_model, sample_synthetic, save_model, synth_quality_report, ColumnMarginal,
    KPolicy, SynthOptions,
};
use mmm_core::{Error, Result};

use crate::commands::CommonArgs;
use crate::report::{ensure_out_dir, out_path, RunConfig};

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Fixed number of clusters for the pre-clustering step.
    #[arg(long, conflicts_with = "kmax")]
    pub k: Option<usize>,
    /// Auto-K bound: choose K in 1..=kmax by evidence.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Auto-K criterion: hmbeta or ti.
    #[arg(long, default_value = "hmbeta")]
    pub select: String,
    /// Tempering exponent for hmbeta auto-K (default 0.5).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Recorded sweeps per chain / rung for auto-K.
    #[arg(long, default_value_t = 800)]
    pub samples: usize,
    /// Fit binary outputs with logistic regression instead of least squares.
    #[arg(long)]
    pub logistic_output: bool,
    /// Reuse a saved generator model instead of refitting.
    #[arg(long)]
    pub from_model: Option<PathBuf>,
    /// Skip the train-on-synthetic quality report.
    #[arg(long)]
    pub no_quality: bool,
    /// L2 strength for the quality-report logistic fits.
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    /// Random restarts for the pre-clustering fits.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
}

pub fn run(args: SynthArgs) -> Result<()> {
    let started = Instant::now();
    ensure_out_dir(&args.common.out)?;
    let (_, data) = args.common.load()?;

    let mut config = RunConfig::new("synth");
    config.set("data", args.common.data.display());
    config.set("schema", args.common.schema.display());
    config.set("seed", args.common.seed);
    config.set("standardize", !args.common.no_standardize);
    config.set("impute", args.common.impute);
    config.set("logistic_output", args.logistic_output);
    config.set("l2", args.l2);
    config.set("restarts", args.restarts);

    let model = match &args.from_model {
        Some(path) => {
            config.set("from_model", path.display());
            load_model(path)?
        }
        None => {
            let policy = match (args.k, args.kmax) {
                (Some(k), None) => {
                    if args.beta.is_some() {
                        return Err(Error::InvalidArgument(
                            "--beta applies to auto-K selection, not --k".into(),
                        ));
                    }
                    config.set("k", k);
                    KPolicy::Fixed(k)
                }
                (None, kmax) => {
                    let k_max = kmax.unwrap_or(8);
                    config.set("kmax", k_max);
                    config.set("select", &args.select);
                    match args.select.as_str() {
                        "hmbeta" => {
                            let beta = args.beta.unwrap_or(0.5);
                            config.set("beta", beta);
                            config.set("samples", args.samples);
                            KPolicy::AutoHmBeta {
                                k_max,
                                beta,
                                n_samples: args.samples,
                                burn_in: args.samples / 5,
                            }
                        }
                        "ti" => {
                            if args.beta.is_some() {
                                return Err(Error::InvalidArgument(
                                    "--beta does not apply to --select ti".into(),
                                ));
                            }
                            config.set("samples", args.samples);
                            KPolicy::AutoTi {
                                k_max,
                                ladder: mmm_core::select::TILadder::uniform(
                                    11,
                                    args.samples,
                                    args.samples / 5,
                                )?,
                            }
                        }
                        other => {
                            return Err(Error::InvalidArgument(format!(
                                "synth --select must be hmbeta or ti, got '{other}'"
                            )))
                        }
                    }
                }
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let options = SynthOptions {
                logistic_output: args.logistic_output,
                fit: FitOptions {
                    n_restarts: args.restarts,
                    ..FitOptions::default()
                },
                threads: args.common.effective_threads(),
            };
            let model = fit_generator(&data, &policy, args.common.seed, &options)?;
            save_model(&model, out_path(&args.common.out, "generator.model"))?;
            model
        }
    };
    config.set("fitted_k", model.k);
    config.set("criterion", &model.criterion);

    let synthetic = sample_synthetic(&model, args.common.seed)?;
    write_csv(
        &synthetic,
        out_path(&args.common.out, "synthetic.csv"),
        true,
    )?;

    let is_binary_output = data
        .schema()
        .output_index()
        .map(|o| data.schema().column_kind(o).arity() == 2)
        .unwrap_or(false);
    if !args.no_quality && is_binary_output {
        let report = synth_quality_report(&data, &synthetic, args.l2, args.common.seed)?;
        let mut out = String::from("metric,column,label,value\n");
        let _ = writeln!(
            out,
            "auc_synthetic_trained,,,{}",
            report.auc_synthetic_trained
        );
        let _ = writeln!(out, "auc_real_reference,,,{}", report.auc_real_reference);
        let _ = writeln!(out, "auc_gap,,,{}", report.auc_gap);
        let _ = writeln!(out, "identical_rows,,,{}", report.identical_row_count);
        for stat in &report.column_stats {
            match stat {
                ColumnMarginal::Numeric {
                    name,
                    real_mean,
                    real_std,
                    synth_mean,
                    synth_std,
                } => {
                    let _ = writeln!(out, "mean_real,{name},,{real_mean}");
                    let _ = writeln!(out, "mean_synthetic,{name},,{synth_mean}");
                    let _ = writeln!(out, "std_real,{name},,{real_std}");
                    let _ = writeln!(out, "std_synthetic,{name},,{synth_std}");
                }
                ColumnMarginal::Categorical {
                    name,
                    labels,
                    real_freqs,
                    synth_freqs,
                } => {
                    for (i, label) in labels.iter().enumerate() {
                        let _ = writeln!(out, "freq_real,{name},{label},{}", real_freqs[i]);
                        let _ = writeln!(out, "freq_synthetic,{name},{label},{}", synth_freqs[i]);
                    }
                }
            }
        }
        std::fs::write(out_path(&args.common.out, "quality_report.csv"), out)?;
    } else if !args.no_quality {
        eprintln!("quality report skipped: output column is not binary");
    }

    config.write_to(&args.common.out)?;
    println!(
        "synthetic dataset written ({} rows, K = {})",
        synthetic.n_rows(),
        model.k
    );
    eprintln!("synth finished in {} ms", started.elapsed().as_millis());
    Ok(())
}
