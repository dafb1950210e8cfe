//! Cluster-wise synthetic tabular data generation.
//!
//! The inputs (all columns except the designated output) are pre-clustered;
//! each cluster gets independent per-column distributions plus a noisy
//! linear model for the output. Sampling draws each synthetic cluster at its
//! original size, generates outputs from the per-cluster linear model, pools
//! the clusters, and shuffles so row order leaks no cluster identity.

mod format;
mod ols;
mod quality;

pub use format::{load_model, save_model};
pub use quality::{synth_quality_report, ColumnMarginal, QualityReport};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cluster::{fit_k, FitOptions, Init, Priors};
use crate::data::{Column, ColumnKind, Dataset, Standardization};
use crate::error::{Error, Result};
use crate::eval::{design_matrix, logistic_fit, sigmoid, Design};
use crate::math::derive_seed;
use crate::select::{fit_sweep, Selection, SweepOptions};

/// Fitted distribution of one input column within one cluster.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnModel {
    /// Add-1-smoothed category frequencies; non-negative, sum to 1.
    Categorical { probs: Vec<f64> },
    /// Sample mean and population standard deviation (std ≥ 0).
    Numeric { mean: f64, std: f64 },
}

/// All input-column models of one cluster, in input-column order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterColumnModel {
    pub columns: Vec<ColumnModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Numeric,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputLink {
    /// y = w·x + b + noise; binary outputs Bernoulli(clamp(y, 0, 1)).
    Linear,
    /// Binary outputs Bernoulli(sigmoid(w·x + b)); no additive noise.
    Logistic,
}

/// Per-cluster noisy linear output model over the input design encoding
/// (numeric columns as stored, categoricals one-hot with the first category
/// dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOutputModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub residual_std: f64,
    pub kind: OutputKind,
    pub link: OutputLink,
}

/// How the number of clusters is chosen when fitting a generator.
#[derive(Debug, Clone)]
pub enum KPolicy {
    Fixed(usize),
    /// Evidence-based choice over 1..=k_max using the tempered harmonic
    /// mean (β, samples, burn-in).
    AutoHmBeta {
        k_max: usize,
        beta: f64,
        n_samples: usize,
        burn_in: usize,
    },
    /// Evidence-based choice over 1..=k_max using thermodynamic integration.
    AutoTi {
        k_max: usize,
        ladder: crate::select::TILadder,
    },
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    /// Fit binary outputs with logistic regression instead of least squares.
    pub logistic_output: bool,
    pub fit: FitOptions,
    pub threads: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            logistic_output: false,
            fit: FitOptions {
                n_restarts: 5,
                ..FitOptions::default()
            },
            threads: 1,
        }
    }
}

/// The full generator: schema and standardization of the source data, the
/// pre-clustering result sizes, per-cluster column and output models, and
/// provenance for reproducibility.
#[derive(Debug, Clone)]
pub struct GeneratorModel {
    pub schema: crate::data::Schema,
    pub standardization: Vec<Option<Standardization>>,
    pub output_index: usize,
    pub cluster_sizes: Vec<usize>,
    pub cluster_columns: Vec<ClusterColumnModel>,
    pub cluster_outputs: Vec<LinearOutputModel>,
    pub k: usize,
    pub seed: u64,
    pub criterion: String,
}

impl GeneratorModel {
    pub fn n_rows(&self) -> usize {
        self.cluster_sizes.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        if self.cluster_sizes.len() != self.k
            || self.cluster_columns.len() != self.k
            || self.cluster_outputs.len() != self.k
        {
            return Err(Error::invalid("generator cluster sections disagree on K"));
        }
        let n_inputs = self.schema.columns().len() - 1;
        for (j, cc) in self.cluster_columns.iter().enumerate() {
            if cc.columns.len() != n_inputs {
                return Err(Error::invalid(format!(
                    "cluster {j} models {} input columns, schema has {n_inputs}",
                    cc.columns.len()
                )));
            }
            for cm in &cc.columns {
                match cm {
                    ColumnModel::Categorical { probs } => {
                        if probs.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
                            return Err(Error::invalid("probabilities out of range"));
                        }
                        let total: f64 = probs.iter().sum();
                        if (total - 1.0).abs() > 1e-9 {
                            return Err(Error::invalid(format!(
                                "probabilities sum to {total}, not 1"
                            )));
                        }
                    }
                    ColumnModel::Numeric { std, .. } => {
                        if *std < 0.0 {
                            return Err(Error::invalid("negative standard deviation"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn fit_output_model(
    design: &Design,
    targets: &[f64],
    rows: &[usize],
    kind: OutputKind,
    logistic: bool,
) -> Option<LinearOutputModel> {
    let sub = design.select_rows(rows);
    let y: Vec<f64> = rows.iter().map(|&r| targets[r]).collect();
    if logistic && kind == OutputKind::Binary {
        let model = logistic_fit(&sub, &y, 1e-4, 500).ok()?;
        return Some(LinearOutputModel {
            weights: model.weights,
            intercept: model.intercept,
            residual_std: 0.0,
            kind,
            link: OutputLink::Logistic,
        });
    }
    let fit = ols::solve(&sub, &y)?;
    Some(LinearOutputModel {
        weights: fit.weights,
        intercept: fit.intercept,
        residual_std: fit.residual_std,
        kind,
        link: OutputLink::Linear,
    })
}

/// Pre-clusters the inputs, fits per-cluster column distributions and output
/// models, and packages everything needed to sample.
pub fn fit_generator(
    data: &Dataset,
    policy: &KPolicy,
    seed: u64,
    options: &SynthOptions,
) -> Result<GeneratorModel> {
    let output_index = data
        .schema()
        .output_index()
        .ok_or_else(|| Error::invalid("dataset has no designated output column"))?;
    if data.n_rows() < 2 {
        return Err(Error::invalid("need at least two rows"));
    }
    let kind = match data.schema().column_kind(output_index) {
        ColumnKind::Numeric => OutputKind::Numeric,
        ColumnKind::Categorical { labels } if labels.len() == 2 => OutputKind::Binary,
        ColumnKind::Categorical { .. } => {
            return Err(Error::invalid(
                "multi-class outputs are not supported; the output must be numeric or binary",
            ))
        }
    };

    let inputs = data.drop_column(output_index)?;
    let priors = Priors::default_for(&inputs);
    let (assignment, k, criterion) = match policy {
        KPolicy::Fixed(k) => {
            let result = fit_k(
                &inputs,
                &priors,
                *k,
                Init::Random,
                derive_seed(seed, 100),
                &options.fit,
            )?;
            (
                result.state.assignment().to_vec(),
                result.state.k(),
                "fixed".to_string(),
            )
        }
        KPolicy::AutoHmBeta {
            k_max,
            beta,
            n_samples,
            burn_in,
        } => {
            let sweep = fit_sweep(
                &inputs,
                &priors,
                *k_max,
                derive_seed(seed, 100),
                &SweepOptions {
                    selection: Selection::HmBeta {
                        beta: *beta,
                        n_samples: *n_samples,
                        burn_in: *burn_in,
                    },
                    fit: options.fit.clone(),
                    threads: options.threads,
                },
            )?;
            let chosen = &sweep.results[sweep.chosen_k - 1];
            (
                chosen.state.assignment().to_vec(),
                chosen.state.k(),
                "hmbeta".to_string(),
            )
        }
        KPolicy::AutoTi { k_max, ladder } => {
            let sweep = fit_sweep(
                &inputs,
                &priors,
                *k_max,
                derive_seed(seed, 100),
                &SweepOptions {
                    selection: Selection::Ti {
                        ladder: ladder.clone(),
                    },
                    fit: options.fit.clone(),
                    threads: options.threads,
                },
            )?;
            let chosen = &sweep.results[sweep.chosen_k - 1];
            (
                chosen.state.assignment().to_vec(),
                chosen.state.k(),
                "ti".to_string(),
            )
        }
    };

    let (design, _) = design_matrix(&inputs, None)?;
    let targets: Vec<f64> = match data.column(output_index) {
        Column::Numeric { values, .. } => values.clone(),
        Column::Categorical(codes) => codes.iter().map(|&c| c as f64).collect(),
    };

    // Global fallback output model for degenerate clusters.
    let all_rows: Vec<usize> = (0..data.n_rows()).collect();
    let global_output =
        fit_output_model(&design, &targets, &all_rows, kind, options.logistic_output)
            .unwrap_or_else(|| intercept_only_model(&targets, &all_rows, design.width, kind));

    let mut cluster_sizes = Vec::with_capacity(k);
    let mut cluster_columns = Vec::with_capacity(k);
    let mut cluster_outputs = Vec::with_capacity(k);
    for j in 0..k {
        let rows: Vec<usize> = (0..data.n_rows()).filter(|&r| assignment[r] == j).collect();
        cluster_sizes.push(rows.len());
        cluster_columns.push(fit_cluster_columns(&inputs, &rows));
        let output = if rows.len() < 2 {
            global_output.clone()
        } else {
            fit_output_model(&design, &targets, &rows, kind, options.logistic_output)
                .unwrap_or_else(|| global_output.clone())
        };
        cluster_outputs.push(output);
    }

    let standardization = (0..data.n_columns())
        .map(|c| data.standardization(c))
        .collect();
    let model = GeneratorModel {
        schema: data.schema().clone(),
        standardization,
        output_index,
        cluster_sizes,
        cluster_columns,
        cluster_outputs,
        k,
        seed,
        criterion,
    };
    model.validate()?;
    Ok(model)
}

fn intercept_only_model(
    targets: &[f64],
    rows: &[usize],
    width: usize,
    kind: OutputKind,
) -> LinearOutputModel {
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&r| targets[r]).sum::<f64>() / n;
    let var = rows
        .iter()
        .map(|&r| (targets[r] - mean).powi(2))
        .sum::<f64>()
        / n;
    LinearOutputModel {
        weights: vec![0.0; width],
        intercept: mean,
        residual_std: var.sqrt(),
        kind,
        link: OutputLink::Linear,
    }
}

fn fit_cluster_columns(inputs: &Dataset, rows: &[usize]) -> ClusterColumnModel {
    let columns = (0..inputs.n_columns())
        .map(|c| match inputs.column(c) {
            Column::Categorical(codes) => {
                let k = inputs.schema().column_kind(c).arity();
                let mut counts = vec![0usize; k];
                for &r in rows {
                    counts[codes[r] as usize] += 1;
                }
                let denom = rows.len() as f64 + k as f64;
                let probs = counts.iter().map(|&n| (n as f64 + 1.0) / denom).collect();
                ColumnModel::Categorical { probs }
            }
            Column::Numeric { values, .. } => {
                let picked: Vec<f64> = rows.iter().map(|&r| values[r]).collect();
                let (mean, std) = crate::math::mean_std(&picked);
                ColumnModel::Numeric {
                    mean,
                    std: std.max(1e-9),
                }
            }
        })
        .collect();
    ClusterColumnModel { columns }
}

/// Samples a synthetic dataset: per cluster, size-many rows drawn
/// column-wise from the fitted distributions, outputs from the per-cluster
/// linear model, everything pooled and shuffled. The result carries the
/// original schema and standardization records, so writing it with
/// destandardization recovers the source scale.
pub fn sample_synthetic(model: &GeneratorModel, seed: u64) -> Result<Dataset> {
    model.validate()?;
    let n = model.n_rows();
    let n_inputs = model.schema.columns().len() - 1;

    // Input rows per cluster, then outputs, in deterministic cluster order.
    let mut input_rows: Vec<Vec<f64>> = Vec::with_capacity(n); // design-space values per column
    let mut cat_rows: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut outputs: Vec<f64> = Vec::with_capacity(n);
    // Which input columns are categorical, with arities, in input order.
    let input_kinds: Vec<Option<usize>> = (0..model.schema.columns().len())
        .filter(|&c| c != model.output_index)
        .map(|c| match model.schema.column_kind(c) {
            ColumnKind::Categorical { labels } => Some(labels.len()),
            ColumnKind::Numeric => None,
        })
        .collect();
    let design_width: usize = input_kinds
        .iter()
        .map(|k| match k {
            Some(arity) => arity - 1,
            None => 1,
        })
        .sum();

    for j in 0..model.k {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1 + j as u64));
        let out_model = &model.cluster_outputs[j];
        if out_model.weights.len() != design_width {
            return Err(Error::invalid(format!(
                "cluster {j}: output model width {} does not match design width {design_width}",
                out_model.weights.len()
            )));
        }
        for _ in 0..model.cluster_sizes[j] {
            let mut nums = Vec::with_capacity(n_inputs);
            let mut cats = Vec::with_capacity(n_inputs);
            let mut design_row = Vec::with_capacity(design_width);
            for (col, cm) in model.cluster_columns[j].columns.iter().enumerate() {
                match cm {
                    ColumnModel::Categorical { probs } => {
                        let u: f64 = rng.random();
                        let mut acc = 0.0;
                        let mut code = probs.len() - 1;
                        for (x, p) in probs.iter().enumerate() {
                            acc += p;
                            if u < acc {
                                code = x;
                                break;
                            }
                        }
                        cats.push(code as u32);
                        let arity = input_kinds[col].expect("categorical column");
                        for x in 1..arity {
                            design_row.push(if x == code { 1.0 } else { 0.0 });
                        }
                    }
                    ColumnModel::Numeric { mean, std } => {
                        let v = if *std > 0.0 {
                            Normal::new(*mean, *std)
                                .map_err(|e| Error::Numerical(e.to_string()))?
                                .sample(&mut rng)
                        } else {
                            *mean
                        };
                        nums.push(v);
                        design_row.push(v);
                    }
                }
            }
            let signal = out_model.intercept
                + design_row
                    .iter()
                    .zip(&out_model.weights)
                    .map(|(x, w)| x * w)
                    .sum::<f64>();
            let y = match (out_model.kind, out_model.link) {
                (OutputKind::Numeric, _) => signal + noise_draw(out_model.residual_std, &mut rng),
                (OutputKind::Binary, OutputLink::Linear) => {
                    let p = (signal + noise_draw(out_model.residual_std, &mut rng)).clamp(0.0, 1.0);
                    if rng.random::<f64>() < p {
                        1.0
                    } else {
                        0.0
                    }
                }
                (OutputKind::Binary, OutputLink::Logistic) => {
                    if rng.random::<f64>() < sigmoid(signal) {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            input_rows.push(nums);
            cat_rows.push(cats);
            outputs.push(y);
        }
    }

    // Pool and shuffle.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, 0)));

    // Reassemble columns in original schema order.
    let mut columns: Vec<Column> = Vec::with_capacity(model.schema.columns().len());
    let mut num_idx = 0usize;
    let mut cat_idx = 0usize;
    for c in 0..model.schema.columns().len() {
        if c == model.output_index {
            match model.schema.column_kind(c) {
                ColumnKind::Numeric => {
                    let values: Vec<f64> = perm.iter().map(|&i| outputs[i]).collect();
                    let transform = model.standardization[c].unwrap_or(Standardization::IDENTITY);
                    columns.push(Column::Numeric { values, transform });
                }
                ColumnKind::Categorical { .. } => {
                    let codes: Vec<u32> = perm.iter().map(|&i| outputs[i] as u32).collect();
                    columns.push(Column::Categorical(codes));
                }
            }
            continue;
        }
        match model.schema.column_kind(c) {
            ColumnKind::Numeric => {
                let values: Vec<f64> = perm.iter().map(|&i| input_rows[i][num_idx]).collect();
                let transform = model.standardization[c].unwrap_or(Standardization::IDENTITY);
                columns.push(Column::Numeric { values, transform });
                num_idx += 1;
            }
            ColumnKind::Categorical { .. } => {
                let codes: Vec<u32> = perm.iter().map(|&i| cat_rows[i][cat_idx]).collect();
                columns.push(Column::Categorical(codes));
                cat_idx += 1;
            }
        }
    }

    Dataset::from_columns(model.schema.clone(), columns)
}

fn noise_draw<R: Rng>(std: f64, rng: &mut R) -> f64 {
    if std > 0.0 {
        Normal::new(0.0, std).expect("finite std").sample(rng)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{RawColumn, Schema};

    fn toy_binary_output_dataset() -> Dataset {
        // Two obvious blobs in x; the binary input f varies inside each blob
        // and the output equals f exactly.
        let schema = Schema::parse("f,cat,a,b\nx,num\ny,cat,0,1\noutput,y\n").unwrap();
        let f: Vec<u32> = (0..40).map(|i| (i % 2) as u32).collect();
        let x: Vec<f64> = (0..40)
            .map(|i| if i < 20 { -3.0 } else { 3.0 } + 0.01 * (i % 7) as f64)
            .collect();
        let y = f.clone();
        Dataset::from_parts(
            schema,
            vec![
                RawColumn::Categorical(f),
                RawColumn::Numeric(x),
                RawColumn::Categorical(y),
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn requires_designated_output() {
        let schema = Schema::parse("x,num\n").unwrap();
        let data =
            Dataset::from_parts(schema, vec![RawColumn::Numeric(vec![1.0, 2.0])], true).unwrap();
        assert!(fit_generator(&data, &KPolicy::Fixed(1), 1, &SynthOptions::default()).is_err());
    }

    #[test]
    fn single_cluster_generator_covers_all_rows() {
        let data = toy_binary_output_dataset();
        let model = fit_generator(&data, &KPolicy::Fixed(1), 3, &SynthOptions::default()).unwrap();
        assert_eq!(model.k, 1);
        assert_eq!(model.cluster_sizes, vec![40]);
        let synth = sample_synthetic(&model, 5).unwrap();
        assert_eq!(synth.n_rows(), 40);
        assert_eq!(synth.schema(), data.schema());
    }

    #[test]
    fn numeric_fit_uses_population_std() {
        let schema = Schema::parse("x,num\ny,num\noutput,y\n").unwrap();
        let data = Dataset::from_parts(
            schema,
            vec![
                RawColumn::Numeric(vec![0.0, 0.0, 2.0, 2.0]),
                RawColumn::Numeric(vec![0.0, 0.0, 1.0, 1.0]),
            ],
            false, // keep raw values so the hand numbers apply
        )
        .unwrap();
        let inputs = data.drop_column(1).unwrap();
        let model = fit_cluster_columns(&inputs, &[0, 1, 2, 3]);
        match &model.columns[0] {
            ColumnModel::Numeric { mean, std } => {
                assert!((mean - 1.0).abs() < 1e-12);
                assert!((std - 1.0).abs() < 1e-12);
            }
            _ => panic!("expected numeric model"),
        }
    }

    #[test]
    fn exact_binary_fit_reproduces_the_input() {
        // Output equals the binary input inside each cluster: OLS recovers it
        // with zero residual, and sampling reproduces the relation exactly.
        let data = toy_binary_output_dataset();
        let model = fit_generator(&data, &KPolicy::Fixed(2), 7, &SynthOptions::default()).unwrap();
        for out in &model.cluster_outputs {
            assert!(out.residual_std < 1e-9);
        }
        let synth = sample_synthetic(&model, 11).unwrap();
        for row in 0..synth.n_rows() {
            let f = synth.cat_code(row, 0);
            let y = synth.cat_code(row, 2);
            assert_eq!(f, y, "row {row}");
        }
    }

    #[test]
    fn degenerate_sampling_distributions() {
        let schema = Schema::parse("g,cat,a,b\nx,num\ny,cat,0,1\noutput,y\n").unwrap();
        let model = GeneratorModel {
            schema: Schema::parse(&schema.render()).unwrap(),
            standardization: vec![None, Some(Standardization::IDENTITY), None],
            output_index: 2,
            cluster_sizes: vec![50],
            cluster_columns: vec![ClusterColumnModel {
                columns: vec![
                    ColumnModel::Categorical {
                        probs: vec![1.0, 0.0],
                    },
                    ColumnModel::Numeric {
                        mean: 0.0,
                        std: 0.0,
                    },
                ],
            }],
            cluster_outputs: vec![LinearOutputModel {
                weights: vec![0.0, 0.0],
                intercept: 1.0,
                residual_std: 0.0,
                kind: OutputKind::Binary,
                link: OutputLink::Linear,
            }],
            k: 1,
            seed: 0,
            criterion: "fixed".into(),
        };
        let synth = sample_synthetic(&model, 9).unwrap();
        for row in 0..synth.n_rows() {
            assert_eq!(synth.cat_code(row, 0), 0);
            assert_eq!(synth.num_value(row, 1), 0.0);
            assert_eq!(synth.cat_code(row, 2), 1); // clamp(1.0) → always 1
        }
    }

    #[test]
    fn sampled_categorical_frequencies_match_model() {
        // χ² goodness-of-fit at the 0.001 level for 10,000 draws.
        let schema = Schema::parse("g,cat,a,b,c\ny,cat,0,1\noutput,y\n").unwrap();
        let probs = vec![0.5, 0.3, 0.2];
        let model = GeneratorModel {
            schema,
            standardization: vec![None, None],
            output_index: 1,
            cluster_sizes: vec![10_000],
            cluster_columns: vec![ClusterColumnModel {
                columns: vec![ColumnModel::Categorical {
                    probs: probs.clone(),
                }],
            }],
            cluster_outputs: vec![LinearOutputModel {
                weights: vec![0.0, 0.0],
                intercept: 0.5,
                residual_std: 0.0,
                kind: OutputKind::Binary,
                link: OutputLink::Linear,
            }],
            k: 1,
            seed: 0,
            criterion: "fixed".into(),
        };
        let synth = sample_synthetic(&model, 13).unwrap();
        let mut counts = [0f64; 3];
        for row in 0..synth.n_rows() {
            counts[synth.cat_code(row, 0) as usize] += 1.0;
        }
        let n = synth.n_rows() as f64;
        let chi2: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(c, p)| {
                let e = n * p;
                (c - e) * (c - e) / e
            })
            .sum();
        // χ²(df=2) critical value at p = 0.001.
        assert!(chi2 < 13.816, "chi-square {chi2}");
    }

    #[test]
    fn fixed_seed_samples_identically() {
        let data = toy_binary_output_dataset();
        let model = fit_generator(&data, &KPolicy::Fixed(2), 3, &SynthOptions::default()).unwrap();
        let a = sample_synthetic(&model, 21).unwrap();
        let b = sample_synthetic(&model, 21).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn moment_matching_at_scaled_size() {
        let data = toy_binary_output_dataset();
        let mut model =
            fit_generator(&data, &KPolicy::Fixed(2), 3, &SynthOptions::default()).unwrap();
        // Scale every cluster 100×; sampled moments must match the fitted
        // models within 3 standard errors.
        for s in &mut model.cluster_sizes {
            *s *= 100;
        }
        let synth = sample_synthetic(&model, 31).unwrap();
        // Column 1 is numeric; mixture mean over clusters weighted by size.
        let mut expected = 0.0;
        let mut var_sum = 0.0;
        let total: usize = model.cluster_sizes.iter().sum();
        for (j, cc) in model.cluster_columns.iter().enumerate() {
            if let ColumnModel::Numeric { mean, std } = &cc.columns[1] {
                let w = model.cluster_sizes[j] as f64 / total as f64;
                expected += w * mean;
                var_sum += w * std * std;
            }
        }
        let values: Vec<f64> = (0..synth.n_rows()).map(|r| synth.num_value(r, 1)).collect();
        let (got_mean, _) = crate::math::mean_std(&values);
        let se = (var_sum / total as f64).sqrt() * 2.0; // conservative
        assert!(
            (got_mean - expected).abs() <= 3.0 * se + 1e-3,
            "mean {got_mean} vs {expected}"
        );
    }
}
