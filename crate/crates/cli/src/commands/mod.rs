pub mod cluster;
pub mod eval_cmd;
pub mod gen_bench;
pub mod select_k;
pub mod synth;

use clap::Args;
use mmm_core::bayes::{DirichletParams, NormalGammaParams};
use mmm_core::cluster::{ColumnPrior, Priors};
use mmm_core::data::{load_csv, Column, Dataset, LoadOptions, Schema};
use mmm_core::math::mean_std;
use mmm_core::select::{Selection, TILadder};
use mmm_core::{Error, Result};
use std::path::PathBuf;

/// Flags shared by every data-consuming subcommand.
#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Input CSV file.
    #[arg(long)]
    pub data: PathBuf,
    /// Plain-text schema file (name,kind[,labels...] per line).
    #[arg(long)]
    pub schema: PathBuf,
    /// Output directory for result artifacts.
    #[arg(long)]
    pub out: PathBuf,
    /// Master seed; every derived RNG stream is a pure function of it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker cap for parallelizable stages (0 = available parallelism).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Keep numeric columns on their raw scale instead of standardizing.
    #[arg(long)]
    pub no_standardize: bool,
    /// Fill missing cells by column mean (numeric) / mode (categorical)
    /// instead of failing.
    #[arg(long)]
    pub impute: bool,
}

impl CommonArgs {
    pub fn load(&self) -> Result<(Schema, Dataset)> {
        let schema = Schema::from_path(&self.schema)?;
        let data = load_csv(
            &self.data,
            &schema,
            &LoadOptions {
                standardize: !self.no_standardize,
                impute: self.impute,
            },
        )?;
        Ok((schema, data))
    }

    pub fn effective_threads(&self) -> usize {
        if self.threads > 0 {
            self.threads
        } else {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        }
    }
}

/// Hyperparameter overrides. Defaults adapt to each column (uniform
/// Dirichlet pseudocounts; Normal-Gamma centered on the column moments);
/// these flags replace them globally.
#[derive(Args, Debug)]
pub struct PriorArgs {
    /// Dirichlet pseudocount for every category of every categorical column.
    #[arg(long)]
    pub dirichlet_c: Option<f64>,
    /// Normal-Gamma location μ0 for every numeric column.
    #[arg(long)]
    pub ng_mu0: Option<f64>,
    /// Normal-Gamma location-precision scale β0 for every numeric column.
    #[arg(long)]
    pub ng_beta0: Option<f64>,
    /// Normal-Gamma shape a0 for every numeric column.
    #[arg(long)]
    pub ng_a0: Option<f64>,
    /// Normal-Gamma rate b0 for every numeric column.
    #[arg(long)]
    pub ng_b0: Option<f64>,
}

impl PriorArgs {
    pub fn priors_for(&self, data: &Dataset) -> Result<Priors> {
        let columns = (0..data.n_columns())
            .map(|c| match data.column(c) {
                Column::Categorical(_) => {
                    let k = data.schema().column_kind(c).arity();
                    let pseudo = self.dirichlet_c.unwrap_or(1.0);
                    Ok(ColumnPrior::Categorical(DirichletParams::new(vec![
                        pseudo; k
                    ])?))
                }
                Column::Numeric { values, .. } => {
                    let (mean, std) = mean_std(values);
                    Ok(ColumnPrior::Numeric(NormalGammaParams::new(
                        self.ng_mu0.unwrap_or(mean),
                        self.ng_beta0.unwrap_or(1.0),
                        self.ng_a0.unwrap_or(1.0),
                        self.ng_b0.unwrap_or((0.5 * std * std).max(1e-6)),
                    )?))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Priors::new(columns))
    }

    pub fn record(&self, config: &mut crate::report::RunConfig) {
        if let Some(v) = self.dirichlet_c {
            config.set("dirichlet_c", v);
        }
        if let Some(v) = self.ng_mu0 {
            config.set("ng_mu0", v);
        }
        if let Some(v) = self.ng_beta0 {
            config.set("ng_beta0", v);
        }
        if let Some(v) = self.ng_a0 {
            config.set("ng_a0", v);
        }
        if let Some(v) = self.ng_b0 {
            config.set("ng_b0", v);
        }
    }
}

/// Estimator tuning flags. Left as options so that passing a flag that the
/// chosen method ignores can be reported as a usage error.
#[derive(Args, Debug)]
pub struct EstimatorArgs {
    /// Tempering exponent for hmbeta (default 0.5).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Recorded sweeps per chain (hm/hmbeta) or per TI rung.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Burn-in sweeps before recording (default 20% of --samples).
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Number of TI rungs (odd, spanning [0,1]).
    #[arg(long)]
    pub rungs: Option<usize>,
    /// TI rung spacing: uniform or cubic.
    #[arg(long)]
    pub ladder: Option<String>,
    /// Exact enumeration: sum all K^N labelings (true) or only labelings
    /// with no empty cluster (false).
    #[arg(long)]
    pub all_labelings: Option<bool>,
    /// Exact enumeration budget on K^N.
    #[arg(long)]
    pub budget: Option<u64>,
}

impl EstimatorArgs {
    /// Builds the selection config for `method`, rejecting flags that do not
    /// belong to it.
    pub fn selection(&self, method: &str) -> Result<Selection> {
        let reject = |flag: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::InvalidArgument(format!(
                    "--{flag} does not apply to --select {method}"
                )))
            } else {
                Ok(())
            }
        };
        match method {
            "exact" => {
                reject("beta", self.beta.is_some())?;
                reject("samples", self.samples.is_some())?;
                reject("burn-in", self.burn_in.is_some())?;
                reject("rungs", self.rungs.is_some())?;
                reject("ladder", self.ladder.is_some())?;
                Ok(Selection::Exact {
                    all_labelings: self.all_labelings.unwrap_or(true),
                    budget: self.budget.unwrap_or(1 << 22),
                })
            }
            "am" => {
                reject("beta", self.beta.is_some())?;
                reject("burn-in", self.burn_in.is_some())?;
                reject("rungs", self.rungs.is_some())?;
                reject("ladder", self.ladder.is_some())?;
                reject("all-labelings", self.all_labelings.is_some())?;
                reject("budget", self.budget.is_some())?;
                Ok(Selection::Am {
                    n_samples: self.samples.unwrap_or(10_000),
                })
            }
            "hm" => {
                reject("beta", self.beta.is_some())?;
                reject("rungs", self.rungs.is_some())?;
                reject("ladder", self.ladder.is_some())?;
                reject("all-labelings", self.all_labelings.is_some())?;
                reject("budget", self.budget.is_some())?;
                let n_samples = self.samples.unwrap_or(2000);
                Ok(Selection::Hm {
                    n_samples,
                    burn_in: self.burn_in.unwrap_or(n_samples / 5),
                })
            }
            "hmbeta" => {
                reject("rungs", self.rungs.is_some())?;
                reject("ladder", self.ladder.is_some())?;
                reject("all-labelings", self.all_labelings.is_some())?;
                reject("budget", self.budget.is_some())?;
                let n_samples = self.samples.unwrap_or(2000);
                Ok(Selection::HmBeta {
                    beta: self.beta.unwrap_or(0.5),
                    n_samples,
                    burn_in: self.burn_in.unwrap_or(n_samples / 5),
                })
            }
            "ti" => {
                reject("beta", self.beta.is_some())?;
                reject("all-labelings", self.all_labelings.is_some())?;
                reject("budget", self.budget.is_some())?;
                let samples = self.samples.unwrap_or(2000);
                let burn_in = self.burn_in.unwrap_or(samples / 5);
                let rungs = self.rungs.unwrap_or(11);
                let ladder = match self.ladder.as_deref().unwrap_or("uniform") {
                    "uniform" => TILadder::uniform(rungs, samples, burn_in)?,
                    "cubic" => TILadder::cubic(rungs, samples, burn_in)?,
                    other => {
                        return Err(Error::InvalidArgument(format!(
                            "unknown ladder '{other}' (expected uniform or cubic)"
                        )))
                    }
                };
                Ok(Selection::Ti { ladder })
            }
            "bic" => {
                reject("beta", self.beta.is_some())?;
                reject("samples", self.samples.is_some())?;
                reject("burn-in", self.burn_in.is_some())?;
                reject("rungs", self.rungs.is_some())?;
                reject("ladder", self.ladder.is_some())?;
                reject("all-labelings", self.all_labelings.is_some())?;
                reject("budget", self.budget.is_some())?;
                Ok(Selection::Bic)
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown selection method '{other}' (expected exact, am, hm, hmbeta, ti, or bic)"
            ))),
        }
    }

    pub fn record(&self, config: &mut crate::report::RunConfig, selection: &Selection) {
        match selection {
            Selection::Exact {
                all_labelings,
                budget,
            } => {
                config.set("all_labelings", all_labelings);
                config.set("budget", budget);
            }
            Selection::Am { n_samples } => config.set("samples", n_samples),
            Selection::Hm { n_samples, burn_in } => {
                config.set("samples", n_samples);
                config.set("burn_in", burn_in);
            }
            Selection::HmBeta {
                beta,
                n_samples,
                burn_in,
            } => {
                config.set("beta", beta);
                config.set("samples", n_samples);
                config.set("burn_in", burn_in);
            }
            Selection::Ti { ladder } => {
                config.set("rungs", ladder.betas().len());
                config.set("samples_per_rung", ladder.samples_per_rung);
                config.set("burn_in", ladder.burn_in);
            }
            Selection::Bic => {}
        }
    }
}
