//! Evaluation utilities: adjusted Rand index, design encoding, logistic
//! regression, and AUC.

mod logistic;

pub use logistic::{auc, logistic_fit, sigmoid, LogisticModel};

use std::collections::HashMap;

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};

/// Adjusted Rand index between two partitions given as label vectors.
/// Labels need not be contiguous; only the equality structure matters.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "partition lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::invalid("partitions are empty"));
    }
    let mut cell: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cell.entry((x, y)).or_insert(0) += 1;
        *rows.entry(x).or_insert(0) += 1;
        *cols.entry(y).or_insert(0) += 1;
    }
    let choose2 = |n: u64| -> f64 { (n as f64) * (n as f64 - 1.0) / 2.0 };
    let index: f64 = cell.values().map(|&n| choose2(n)).sum();
    let sum_a: f64 = rows.values().map(|&n| choose2(n)).sum();
    let sum_b: f64 = cols.values().map(|&n| choose2(n)).sum();
    let total = choose2(a.len() as u64);
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    if (max_index - expected).abs() < 1e-12 {
        // Both partitions degenerate in the same way; identical by convention.
        return Ok(1.0);
    }
    Ok((index - expected) / (max_index - expected))
}

/// Row-major dense design matrix.
#[derive(Debug, Clone)]
pub struct Design {
    pub n_rows: usize,
    pub width: usize,
    values: Vec<f64>,
}

impl Design {
    pub fn new(n_rows: usize, width: usize) -> Self {
        Design {
            n_rows,
            width,
            values: vec![0.0; n_rows * width],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n_rows = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut values = Vec::with_capacity(n_rows * width);
        for r in rows {
            assert_eq!(r.len(), width);
            values.extend(r);
        }
        Design {
            n_rows,
            width,
            values,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.width..(i + 1) * self.width]
    }

    /// Sub-design restricted to the given row indices.
    pub fn select_rows(&self, rows: &[usize]) -> Design {
        let mut out = Design::new(rows.len(), self.width);
        for (dst, &src) in rows.iter().enumerate() {
            out.row_mut(dst).copy_from_slice(self.row(src));
        }
        out
    }
}

/// Encodes a dataset for linear/logistic models: numeric columns as stored
/// (standardized at ingest), categorical columns one-hot with the first
/// category dropped. `target` names a column to exclude from the features;
/// its values (numeric as stored, categorical as codes) are returned
/// alongside.
pub fn design_matrix(data: &Dataset, target: Option<usize>) -> Result<(Design, Vec<f64>)> {
    if let Some(t) = target {
        if t >= data.n_columns() {
            return Err(Error::invalid(format!("target column {t} out of range")));
        }
    }
    let n = data.n_rows();
    let mut width = 0usize;
    for c in 0..data.n_columns() {
        if Some(c) == target {
            continue;
        }
        width += match data.column(c) {
            Column::Categorical(_) => data.schema().column_kind(c).arity() - 1,
            Column::Numeric { .. } => 1,
        };
    }
    let mut design = Design::new(n, width);
    for row in 0..n {
        let out = design.row_mut(row);
        let mut at = 0usize;
        for c in 0..data.n_columns() {
            if Some(c) == target {
                continue;
            }
            match data.column(c) {
                Column::Numeric { values, .. } => {
                    out[at] = values[row];
                    at += 1;
                }
                Column::Categorical(codes) => {
                    let k = data.schema().column_kind(c).arity();
                    let code = codes[row] as usize;
                    if code > 0 {
                        out[at + code - 1] = 1.0;
                    }
                    at += k - 1;
                }
            }
        }
    }
    let targets = match target {
        None => Vec::new(),
        Some(t) => match data.column(t) {
            Column::Numeric { values, .. } => values.clone(),
            Column::Categorical(codes) => codes.iter().map(|&c| c as f64).collect(),
        },
    };
    Ok((design, targets))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_partitions_score_one() {
        let a = vec![0, 0, 1, 2, 2, 1];
        let relabeled = vec![7, 7, 3, 9, 9, 3];
        assert_eq!(adjusted_rand_index(&a, &a).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&a, &relabeled).unwrap(), 1.0);
    }

    #[test]
    fn one_cluster_versus_singletons_scores_zero() {
        let a = vec![0; 6];
        let b: Vec<usize> = (0..6).collect();
        let ari = adjusted_rand_index(&a, &b).unwrap();
        assert!(ari.abs() < 1e-12);
    }

    #[test]
    fn hand_computed_contingency_value() {
        let a = vec![0, 0, 1, 1];
        let b = vec![0, 0, 1, 2];
        let ari = adjusted_rand_index(&a, &b).unwrap();
        assert!((ari - 4.0 / 7.0).abs() < 1e-12, "{ari}");
    }

    #[test]
    fn symmetric_and_length_checked() {
        let a = vec![0, 1, 0, 1, 1];
        let b = vec![1, 1, 0, 0, 1];
        let xy = adjusted_rand_index(&a, &b).unwrap();
        let yx = adjusted_rand_index(&b, &a).unwrap();
        assert!((xy - yx).abs() < 1e-15);
        assert!(adjusted_rand_index(&a, &[0, 1]).is_err());
    }

    #[test]
    fn design_one_hot_drops_first_category() {
        use crate::data::{RawColumn, Schema};
        let schema = Schema::parse("g,cat,a,b,c\nx,num\ny,num\noutput,y\n").unwrap();
        let data = Dataset::from_parts(
            schema,
            vec![
                RawColumn::Categorical(vec![0, 1, 2]),
                RawColumn::Numeric(vec![1.0, 2.0, 3.0]),
                RawColumn::Numeric(vec![0.0, 1.0, 0.0]),
            ],
            false,
        )
        .unwrap();
        let (design, y) = design_matrix(&data, Some(2)).unwrap();
        assert_eq!(design.width, 3); // 2 indicators + 1 numeric
        assert_eq!(design.row(0), &[0.0, 0.0, 1.0]);
        assert_eq!(design.row(1), &[1.0, 0.0, 2.0]);
        assert_eq!(design.row(2), &[0.0, 1.0, 3.0]);
        assert_eq!(y, vec![0.0, 1.0, 0.0]);
    }
}
