use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use mmm_core::bench::{gen_benchmark, with_planted_binary_output, BenchKind, BenchSpec};
use mmm_core::data::write_csv;
use mmm_core::{Error, Result};

use crate::report::{ensure_out_dir, out_path, write_assignments, RunConfig};

#[derive(Args, Debug)]
pub struct GenBenchArgs {
    /// Benchmark family: categorical, numeric-diffmean, numeric-samemean, or mixed.
    #[arg(long)]
    pub kind: String,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5000)]
    pub rows: usize,
    /// Cluster-size ratio, e.g. 5:4:3:2:1 or 1:1:1.
    #[arg(long, default_value = "5:4:3:2:1")]
    pub ratio: String,
    /// Categorical separation Δ.
    #[arg(long, default_value_t = 2.5)]
    pub delta: f64,
    /// Numeric std spread δσ (mixed defaults to 5 − Δ when omitted).
    #[arg(long)]
    pub dsigma: Option<f64>,
    /// Override the column mix (defaults follow the benchmark family).
    #[arg(long)]
    pub binary_cols: Option<usize>,
    #[arg(long)]
    pub cat4_cols: Option<usize>,
    #[arg(long)]
    pub numeric_cols: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Append a designated binary output column driven by per-cluster linear
    /// weights over the inputs (for synthetic-data protocol runs).
    #[arg(long)]
    pub plant_output: bool,
    /// Weight scale for the planted output signal.
    #[arg(long, default_value_t = 1.3, requires = "plant_output")]
    pub signal_scale: f64,
    /// Gaussian noise on the planted output's linear score.
    #[arg(long, default_value_t = 0.25, requires = "plant_output")]
    pub noise_std: f64,
}

fn parse_ratio(text: &str) -> Result<Vec<f64>> {
    let weights: Vec<f64> = text
        .split(':')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad ratio component '{w}'")))
        })
        .collect::<Result<_>>()?;
    if weights.is_empty() {
        return Err(Error::InvalidArgument("empty ratio".into()));
    }
    Ok(weights)
}

pub fn run(args: GenBenchArgs) -> Result<()> {
    let started = Instant::now();
    ensure_out_dir(&args.out)?;
    let kind = BenchKind::parse(&args.kind)?;
    let defaults = BenchSpec::defaults(kind);
    let spec = BenchSpec {
        kind,
        n_rows: args.rows,
        ratio: parse_ratio(&args.ratio)?,
        delta: args.delta,
        delta_sigma: args.dsigma,
        n_binary: args.binary_cols.unwrap_or(defaults.n_binary),
        n_cat4: args.cat4_cols.unwrap_or(defaults.n_cat4),
        n_numeric: args.numeric_cols.unwrap_or(defaults.n_numeric),
        seed: args.seed,
    };
    let (data, labels) = gen_benchmark(&spec)?;
    let data = if args.plant_output {
        with_planted_binary_output(
            &data,
            &labels,
            args.signal_scale,
            args.noise_std,
            spec.seed ^ 0x9E37_79B9,
        )?
    } else {
        data
    };

    write_csv(&data, out_path(&args.out, "bench.csv"), true)?;
    data.schema()
        .write_to(out_path(&args.out, "bench.schema"))?;
    write_assignments(&out_path(&args.out, "labels.csv"), &labels)?;

    let mut config = RunConfig::new("gen-bench");
    config.set("kind", kind.as_str());
    config.set("rows", spec.n_rows);
    config.set("ratio", &args.ratio);
    config.set("delta", spec.delta);
    config.set("dsigma", spec.effective_delta_sigma());
    config.set("binary_cols", spec.n_binary);
    config.set("cat4_cols", spec.n_cat4);
    config.set("numeric_cols", spec.n_numeric);
    config.set("seed", spec.seed);
    config.set("plant_output", args.plant_output);
    if args.plant_output {
        config.set("signal_scale", args.signal_scale);
        config.set("noise_std", args.noise_std);
    }
    config.write_to(&args.out)?;

    println!(
        "benchmark written: {} rows, {} clusters, kind {}",
        spec.n_rows,
        spec.n_clusters(),
        kind.as_str()
    );
    eprintln!("gen-bench finished in {} ms", started.elapsed().as_millis());
    Ok(())
}
