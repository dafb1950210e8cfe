//! Synthetic-data quality protocol: train on synthetic, test on real,
//! against a real-trained cross-validated reference, plus per-column
//! marginal comparisons and an identical-row count.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::eval::{auc, design_matrix, logistic_fit};
use crate::math::derive_seed;

#[derive(Debug, Clone)]
pub enum ColumnMarginal {
    Numeric {
        name: String,
        real_mean: f64,
        real_std: f64,
        synth_mean: f64,
        synth_std: f64,
    },
    Categorical {
        name: String,
        labels: Vec<String>,
        real_freqs: Vec<f64>,
        synth_freqs: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct QualityReport {
    /// Logistic regression trained on the synthetic rows, AUC on the real rows.
    pub auc_synthetic_trained: f64,
    /// Real-trained reference: pooled out-of-fold AUC from 5-fold CV.
    pub auc_real_reference: f64,
    pub auc_gap: f64,
    pub column_stats: Vec<ColumnMarginal>,
    /// Synthetic rows identical to some real row across all columns.
    pub identical_row_count: usize,
    pub seed: u64,
}

fn raw_numeric(data: &Dataset, col: usize) -> Vec<f64> {
    (0..data.n_rows())
        .map(|r| data.num_value_raw(r, col))
        .collect()
}

fn cat_freqs(data: &Dataset, col: usize, k: usize) -> Vec<f64> {
    let mut counts = vec![0.0; k];
    for r in 0..data.n_rows() {
        counts[data.cat_code(r, col) as usize] += 1.0;
    }
    let n = data.n_rows() as f64;
    counts.iter().map(|c| c / n).collect()
}

fn row_key(data: &Dataset, row: usize) -> Vec<u64> {
    (0..data.n_columns())
        .map(|c| match data.column(c) {
            Column::Categorical(codes) => codes[row] as u64,
            Column::Numeric { values, .. } => values[row].to_bits(),
        })
        .collect()
}

/// Cross-validated real-trained reference AUC: 5 folds, seeded shuffle,
/// out-of-fold scores pooled into one AUC.
pub fn cross_validated_auc(data: &Dataset, l2: f64, seed: u64) -> Result<f64> {
    let output = data
        .schema()
        .output_index()
        .ok_or_else(|| Error::invalid("dataset has no designated output column"))?;
    let (design, y) = design_matrix(data, Some(output))?;
    let n = data.n_rows();
    let folds = 5.min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut scores = vec![0.0; n];
    for fold in 0..folds {
        let held: Vec<usize> = order
            .iter()
            .copied()
            .enumerate()
            .filter(|(i, _)| i % folds == fold)
            .map(|(_, r)| r)
            .collect();
        let train: Vec<usize> = order
            .iter()
            .copied()
            .enumerate()
            .filter(|(i, _)| i % folds != fold)
            .map(|(_, r)| r)
            .collect();
        let train_design = design.select_rows(&train);
        let train_y: Vec<f64> = train.iter().map(|&r| y[r]).collect();
        let model = logistic_fit(&train_design, &train_y, l2, 500)?;
        for &r in &held {
            scores[r] = model.decision(design.row(r));
        }
    }
    auc(&scores, &y)
}

/// Trains on the synthetic rows, evaluates on the real rows, and reports the
/// gap against the cross-validated real-trained reference along with
/// marginal statistics (raw scale) and the identical-row smoke count.
pub fn synth_quality_report(
    real: &Dataset,
    synthetic: &Dataset,
    l2: f64,
    seed: u64,
) -> Result<QualityReport> {
    if real.schema() != synthetic.schema() {
        return Err(Error::invalid("real and synthetic schemas differ"));
    }
    let output = real
        .schema()
        .output_index()
        .ok_or_else(|| Error::invalid("dataset has no designated output column"))?;
    if real.schema().column_kind(output).arity() != 2 {
        return Err(Error::invalid(
            "the quality protocol needs a binary output column",
        ));
    }

    let (real_design, real_y) = design_matrix(real, Some(output))?;
    let (synth_design, synth_y) = design_matrix(synthetic, Some(output))?;

    let model = logistic_fit(&synth_design, &synth_y, l2, 500)?;
    let scores: Vec<f64> = (0..real.n_rows())
        .map(|r| model.decision(real_design.row(r)))
        .collect();
    let auc_synthetic_trained = auc(&scores, &real_y)?;
    let auc_real_reference = cross_validated_auc(real, l2, derive_seed(seed, 1))?;

    let mut column_stats = Vec::new();
    for c in 0..real.n_columns() {
        let name = real.schema().column_name(c).to_string();
        match real.schema().column_kind(c) {
            crate::data::ColumnKind::Numeric => {
                let (real_mean, real_std) = crate::math::mean_std(&raw_numeric(real, c));
                let (synth_mean, synth_std) = crate::math::mean_std(&raw_numeric(synthetic, c));
                column_stats.push(ColumnMarginal::Numeric {
                    name,
                    real_mean,
                    real_std,
                    synth_mean,
                    synth_std,
                });
            }
            crate::data::ColumnKind::Categorical { labels } => {
                column_stats.push(ColumnMarginal::Categorical {
                    name,
                    labels: labels.clone(),
                    real_freqs: cat_freqs(real, c, labels.len()),
                    synth_freqs: cat_freqs(synthetic, c, labels.len()),
                });
            }
        }
    }

    let real_rows: HashSet<Vec<u64>> = (0..real.n_rows()).map(|r| row_key(real, r)).collect();
    let identical_row_count = (0..synthetic.n_rows())
        .filter(|&r| real_rows.contains(&row_key(synthetic, r)))
        .count();

    Ok(QualityReport {
        auc_synthetic_trained,
        auc_real_reference,
        auc_gap: auc_synthetic_trained - auc_real_reference,
        column_stats,
        identical_row_count,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{gen_benchmark, with_planted_binary_output, BenchKind, BenchSpec};
    use rand::Rng;

    fn protocol_dataset(seed: u64) -> Dataset {
        let spec = BenchSpec {
            n_rows: 600,
            ratio: vec![1.0, 1.0],
            n_cat4: 2,
            n_numeric: 3,
            delta: 3.0,
            seed,
            ..BenchSpec::defaults(BenchKind::Mixed)
        };
        let (data, labels) = gen_benchmark(&spec).unwrap();
        with_planted_binary_output(&data, &labels, 1.2, 0.3, seed ^ 0xABCD).unwrap()
    }

    #[test]
    fn copy_of_real_scores_like_real() {
        let data = protocol_dataset(3);
        let report = synth_quality_report(&data, &data, 1e-4, 17).unwrap();
        assert!(
            report.auc_gap.abs() <= 0.02,
            "gap {} too large for an identical copy",
            report.auc_gap
        );
        // Every row matches itself.
        assert_eq!(report.identical_row_count, data.n_rows());
    }

    #[test]
    fn label_shuffled_synthetic_destroys_the_signal() {
        let data = protocol_dataset(5);
        let output = data.schema().output_index().unwrap();
        // Average over independent shuffles: each shuffled fit is a direction
        // unrelated to the real labels, so the mean AUC sits near one half.
        let mut aucs = Vec::new();
        for seed in 0..10u64 {
            let mut columns: Vec<Column> = (0..data.n_columns())
                .map(|c| data.column(c).clone())
                .collect();
            if let Column::Categorical(codes) = &mut columns[output] {
                let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
                codes.shuffle(&mut rng);
            }
            let shuffled = Dataset::from_columns(data.schema().clone(), columns).unwrap();
            let report = synth_quality_report(&data, &shuffled, 1e-4, seed).unwrap();
            aucs.push(report.auc_synthetic_trained);
        }
        let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
        assert!((mean - 0.5).abs() <= 0.08, "shuffled-control AUC {mean}");
    }

    #[test]
    fn requires_binary_output() {
        use crate::data::{RawColumn, Schema};
        let schema = Schema::parse("x,num\ny,num\noutput,y\n").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..20).map(|_| rng.random::<f64>()).collect();
        let ys: Vec<f64> = (0..20).map(|_| rng.random::<f64>()).collect();
        let data = Dataset::from_parts(
            schema,
            vec![RawColumn::Numeric(xs), RawColumn::Numeric(ys)],
            true,
        )
        .unwrap();
        assert!(synth_quality_report(&data, &data, 1e-4, 1).is_err());
    }
}
