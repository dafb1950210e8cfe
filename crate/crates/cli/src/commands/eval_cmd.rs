use std::path::PathBuf;

use clap::{Args, Subcommand};
use mmm_core::data::{load_csv, LoadOptions, Schema};
use mmm_core::eval::{adjusted_rand_index, auc, design_matrix, logistic_fit};
use mmm_core::{Error, Result};

use crate::report::{read_assignments, write_metrics};

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(subcommand)]
    pub what: EvalWhat,
}

#[derive(Subcommand, Debug)]
pub enum EvalWhat {
    /// Adjusted Rand index between two assignment files.
    Ari {
        /// Predicted assignment CSV (row_index,cluster).
        #[arg(long)]
        pred: PathBuf,
        /// Ground-truth assignment CSV.
        #[arg(long)]
        truth: PathBuf,
        /// Metric CSV destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train logistic regression on one CSV, report AUC on another.
    Auc {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Schema shared by both files; must designate a binary output.
        #[arg(long)]
        schema: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        l2: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(
    out: Option<&std::path::Path>,
    rows: Vec<(String, String, usize, String, f64, u64)>,
) -> Result<()> {
    match out {
        Some(path) => write_metrics(path, &rows),
        None => {
            println!("dataset,method,run,metric,value,seed");
            for (dataset, method, run, metric, value, seed) in rows {
                println!("{dataset},{method},{run},{metric},{value},{seed}");
            }
            Ok(())
        }
    }
}

fn stem(path: &std::path::Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run(args: EvalArgs) -> Result<()> {
    match args.what {
        EvalWhat::Ari { pred, truth, out } => {
            let predicted = read_assignments(&pred)?;
            let reference = read_assignments(&truth)?;
            let value = adjusted_rand_index(&predicted, &reference)?;
            println!("ari = {value}");
            emit(
                out.as_deref(),
                vec![(stem(&pred), "ari".into(), 0, "ari".into(), value, 0)],
            )
        }
        EvalWhat::Auc {
            train,
            test,
            schema,
            l2,
            seed,
            out,
        } => {
            let schema = Schema::from_path(&schema)?;
            let output = schema
                .output_index()
                .ok_or_else(|| Error::InvalidArgument("schema designates no output".into()))?;
            if schema.column_kind(output).arity() != 2 {
                return Err(Error::InvalidArgument(
                    "AUC evaluation needs a binary output column".into(),
                ));
            }
            let options = LoadOptions::default();
            let train_data = load_csv(&train, &schema, &options)?;
            let test_data = load_csv(&test, &schema, &options)?;
            let (train_design, train_y) = design_matrix(&train_data, Some(output))?;
            let (test_design, test_y) = design_matrix(&test_data, Some(output))?;
            let model = logistic_fit(&train_design, &train_y, l2, 500)?;
            let scores: Vec<f64> = (0..test_design.n_rows)
                .map(|r| model.decision(test_design.row(r)))
                .collect();
            let value = auc(&scores, &test_y)?;
            println!("auc = {value}");
            emit(
                out.as_deref(),
                vec![(stem(&test), "logistic".into(), 0, "auc".into(), value, seed)],
            )
        }
    }
}
