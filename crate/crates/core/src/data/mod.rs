//! Typed columnar datasets: schema, ingestion, standardization, CSV I/O.

mod csv_io;
mod schema;

pub use csv_io::{load_csv, write_csv, LoadOptions};
pub use schema::{ColumnKind, Schema};

use crate::error::{Error, Result};
use crate::math::mean_std;

/// Recorded standardization transform of a numeric column: the value stored
/// in the dataset is (raw − mean) / std.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardization {
    pub mean: f64,
    pub std: f64,
}

impl Standardization {
    pub const IDENTITY: Standardization = Standardization {
        mean: 0.0,
        std: 1.0,
    };

    pub fn apply(&self, raw: f64) -> f64 {
        (raw - self.mean) / self.std
    }

    pub fn invert(&self, standardized: f64) -> f64 {
        standardized * self.std + self.mean
    }
}

/// One ingested column: categorical codes or (possibly standardized) reals.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Categorical(Vec<u32>),
    Numeric {
        values: Vec<f64>,
        transform: Standardization,
    },
}

/// Immutable columnar table with a schema and per-column standardization
/// records. Categorical cells are integer codes in schema label order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    n_rows: usize,
    columns: Vec<Column>,
}

/// A raw (pre-standardization) column, as handed to [`Dataset::from_parts`].
#[derive(Debug, Clone)]
pub enum RawColumn {
    Categorical(Vec<u32>),
    Numeric(Vec<f64>),
}

impl Dataset {
    /// Assembles a dataset from raw columns, validating codes against the
    /// schema and standardizing numeric columns unless told otherwise.
    pub fn from_parts(schema: Schema, raw: Vec<RawColumn>, standardize: bool) -> Result<Self> {
        if raw.len() != schema.columns().len() {
            return Err(Error::data(format!(
                "expected {} columns, got {}",
                schema.columns().len(),
                raw.len()
            )));
        }
        let n_rows = match raw.first() {
            Some(RawColumn::Categorical(v)) => v.len(),
            Some(RawColumn::Numeric(v)) => v.len(),
            None => 0,
        };
        let mut columns = Vec::with_capacity(raw.len());
        for (idx, (col, (name, kind))) in raw.into_iter().zip(schema.columns()).enumerate() {
            match (col, kind) {
                (RawColumn::Categorical(codes), ColumnKind::Categorical { labels }) => {
                    if codes.len() != n_rows {
                        return Err(Error::data(format!(
                            "column '{name}' has {} rows, expected {n_rows}",
                            codes.len()
                        )));
                    }
                    let k = labels.len() as u32;
                    if let Some(bad) = codes.iter().find(|&&c| c >= k) {
                        return Err(Error::data(format!(
                            "column '{name}' has code {bad} outside 0..{k}"
                        )));
                    }
                    columns.push(Column::Categorical(codes));
                }
                (RawColumn::Numeric(values), ColumnKind::Numeric) => {
                    if values.len() != n_rows {
                        return Err(Error::data(format!(
                            "column '{name}' has {} rows, expected {n_rows}",
                            values.len()
                        )));
                    }
                    if values.iter().any(|v| !v.is_finite()) {
                        return Err(Error::data(format!(
                            "column '{name}' contains a non-finite value"
                        )));
                    }
                    columns.push(standardize_column(values, standardize));
                }
                _ => {
                    return Err(Error::data(format!(
                        "column {idx} ('{name}') does not match its schema kind"
                    )));
                }
            }
        }
        Ok(Dataset {
            schema,
            n_rows,
            columns,
        })
    }

    /// Assembles a dataset from already-ingested columns, preserving the
    /// standardization records they carry. Used when sampling synthetic data
    /// in the standardized space of an existing dataset.
    pub fn from_columns(schema: Schema, columns: Vec<Column>) -> Result<Self> {
        if columns.len() != schema.columns().len() {
            return Err(Error::data(format!(
                "expected {} columns, got {}",
                schema.columns().len(),
                columns.len()
            )));
        }
        let n_rows = match columns.first() {
            Some(Column::Categorical(v)) => v.len(),
            Some(Column::Numeric { values, .. }) => values.len(),
            None => 0,
        };
        for (idx, (col, (name, kind))) in columns.iter().zip(schema.columns()).enumerate() {
            match (col, kind) {
                (Column::Categorical(codes), ColumnKind::Categorical { labels }) => {
                    if codes.len() != n_rows {
                        return Err(Error::data(format!("column '{name}' row count mismatch")));
                    }
                    let k = labels.len() as u32;
                    if codes.iter().any(|&c| c >= k) {
                        return Err(Error::data(format!(
                            "column '{name}' has an out-of-range code"
                        )));
                    }
                }
                (Column::Numeric { values, .. }, ColumnKind::Numeric) => {
                    if values.len() != n_rows {
                        return Err(Error::data(format!("column '{name}' row count mismatch")));
                    }
                    if values.iter().any(|v| !v.is_finite()) {
                        return Err(Error::data(format!(
                            "column '{name}' contains a non-finite value"
                        )));
                    }
                }
                _ => {
                    return Err(Error::data(format!(
                        "column {idx} ('{name}') does not match its schema kind"
                    )));
                }
            }
        }
        Ok(Dataset {
            schema,
            n_rows,
            columns,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, idx: usize) -> &Column {
        &self.columns[idx]
    }

    /// Categorical code at (row, column); panics if the column is numeric.
    pub fn cat_code(&self, row: usize, col: usize) -> u32 {
        match &self.columns[col] {
            Column::Categorical(codes) => codes[row],
            Column::Numeric { .. } => panic!("column {col} is numeric"),
        }
    }

    /// Standardized numeric value at (row, column); panics if categorical.
    pub fn num_value(&self, row: usize, col: usize) -> f64 {
        match &self.columns[col] {
            Column::Numeric { values, .. } => values[row],
            Column::Categorical(_) => panic!("column {col} is categorical"),
        }
    }

    pub fn standardization(&self, col: usize) -> Option<Standardization> {
        match &self.columns[col] {
            Column::Numeric { transform, .. } => Some(*transform),
            Column::Categorical(_) => None,
        }
    }

    /// Raw-scale numeric value (standardization inverted).
    pub fn num_value_raw(&self, row: usize, col: usize) -> f64 {
        match &self.columns[col] {
            Column::Numeric { values, transform } => transform.invert(values[row]),
            Column::Categorical(_) => panic!("column {col} is categorical"),
        }
    }

    /// A copy of this dataset without the given column.
    pub fn drop_column(&self, col: usize) -> Result<Dataset> {
        if col >= self.columns.len() {
            return Err(Error::invalid(format!("no column {col} to drop")));
        }
        let schema = self.schema.without_column(col)?;
        let mut columns = self.columns.clone();
        columns.remove(col);
        Ok(Dataset {
            schema,
            n_rows: self.n_rows,
            columns,
        })
    }

    /// True when the two rows agree on every column (numeric compared
    /// bit-for-bit in standardized space).
    pub fn rows_equal(&self, row_a: usize, other: &Dataset, row_b: usize) -> bool {
        self.columns
            .iter()
            .zip(&other.columns)
            .all(|(ca, cb)| match (ca, cb) {
                (Column::Categorical(a), Column::Categorical(b)) => a[row_a] == b[row_b],
                (Column::Numeric { values: a, .. }, Column::Numeric { values: b, .. }) => {
                    a[row_a].to_bits() == b[row_b].to_bits()
                }
                _ => false,
            })
    }
}

fn standardize_column(values: Vec<f64>, standardize: bool) -> Column {
    if !standardize {
        return Column::Numeric {
            values,
            transform: Standardization::IDENTITY,
        };
    }
    let (mean, std) = mean_std(&values);
    let std = std.max(1e-12);
    let transform = Standardization { mean, std };
    let values = values.into_iter().map(|v| transform.apply(v)).collect();
    Column::Numeric { values, transform }
}

/// Mean-imputes a numeric column; errors when every value is missing.
pub fn impute_mean(column: &[Option<f64>]) -> Result<Vec<f64>> {
    let present: Vec<f64> = column.iter().filter_map(|v| *v).collect();
    if present.is_empty() {
        return Err(Error::data("cannot impute an all-missing column"));
    }
    let mean = present.iter().sum::<f64>() / present.len() as f64;
    Ok(column.iter().map(|v| v.unwrap_or(mean)).collect())
}

/// Mode-imputes a categorical column (ties break toward the lowest code);
/// errors when every value is missing.
pub fn impute_mode(column: &[Option<u32>], k: usize) -> Result<Vec<u32>> {
    let mut counts = vec![0usize; k];
    let mut seen = false;
    for v in column.iter().flatten() {
        counts[*v as usize] += 1;
        seen = true;
    }
    if !seen {
        return Err(Error::data("cannot impute an all-missing column"));
    }
    let mode = counts
        .iter()
        .enumerate()
        .max_by(|(ia, ca), (ib, cb)| ca.cmp(cb).then(ib.cmp(ia)))
        .map(|(i, _)| i as u32)
        .unwrap();
    Ok(column.iter().map(|v| v.unwrap_or(mode)).collect())
}
