//! CSV ingestion and emission against a schema.
//!
//! RFC-4180-style CSV, comma delimiter, first row is the header, UTF-8.
//! Missing cells are the empty string or "NA".

use std::path::Path;

use crate::data::{impute_mean, impute_mode, Column, ColumnKind, Dataset, RawColumn, Schema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Standardize numeric columns to mean 0, std 1 (std floored at 1e-12).
    pub standardize: bool,
    /// Replace missing cells by the column mean (numeric) / mode
    /// (categorical) instead of erroring.
    pub impute: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            standardize: true,
            impute: false,
        }
    }
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "NA"
}

/// Loads a CSV file against a schema.
///
/// The header must list exactly the schema's column names in order.
/// Categorical cells map to codes by schema label order; numeric cells parse
/// as finite reals and are standardized per `options`.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema, options: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?
        .clone();
    let names: Vec<&str> = schema.columns().iter().map(|(n, _)| n.as_str()).collect();
    let found: Vec<&str> = headers.iter().map(str::trim).collect();
    if found != names {
        return Err(Error::data(format!(
            "{}: header {:?} does not match schema columns {:?}",
            path.display(),
            found,
            names
        )));
    }

    let n_cols = names.len();
    let mut cat_cells: Vec<Vec<Option<u32>>> = vec![Vec::new(); n_cols];
    let mut num_cells: Vec<Vec<Option<f64>>> = vec![Vec::new(); n_cols];

    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
        if record.len() != n_cols {
            return Err(Error::data(format!(
                "row {}: expected {n_cols} cells, got {}",
                row_idx + 1,
                record.len()
            )));
        }
        for (col_idx, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let (name, kind) = &schema.columns()[col_idx];
            if is_missing(cell) {
                if !options.impute {
                    return Err(Error::data(format!(
                        "row {}, column '{name}': missing value (pass the impute option to fill)",
                        row_idx + 1
                    )));
                }
                match kind {
                    ColumnKind::Categorical { .. } => cat_cells[col_idx].push(None),
                    ColumnKind::Numeric => num_cells[col_idx].push(None),
                }
                continue;
            }
            match kind {
                ColumnKind::Categorical { labels } => {
                    let code = labels.iter().position(|l| l == cell).ok_or_else(|| {
                        Error::data(format!(
                            "row {}, column '{name}': unknown category label '{cell}'",
                            row_idx + 1
                        ))
                    })?;
                    cat_cells[col_idx].push(Some(code as u32));
                }
                ColumnKind::Numeric => {
                    let value: f64 = cell.parse().map_err(|_| {
                        Error::data(format!(
                            "row {}, column '{name}': cannot parse '{cell}' as a number",
                            row_idx + 1
                        ))
                    })?;
                    if !value.is_finite() {
                        return Err(Error::data(format!(
                            "row {}, column '{name}': non-finite value '{cell}'",
                            row_idx + 1
                        )));
                    }
                    num_cells[col_idx].push(Some(value));
                }
            }
        }
    }

    let mut raw = Vec::with_capacity(n_cols);
    for (col_idx, (name, kind)) in schema.columns().iter().enumerate() {
        match kind {
            ColumnKind::Categorical { labels } => {
                let cells = &cat_cells[col_idx];
                let codes = if cells.iter().all(|c| c.is_some()) {
                    cells.iter().map(|c| c.unwrap()).collect()
                } else {
                    impute_mode(cells, labels.len())
                        .map_err(|e| Error::data(format!("column '{name}': {e}")))?
                };
                raw.push(RawColumn::Categorical(codes));
            }
            ColumnKind::Numeric => {
                let cells = &num_cells[col_idx];
                let values = if cells.iter().all(|c| c.is_some()) {
                    cells.iter().map(|c| c.unwrap()).collect()
                } else {
                    impute_mean(cells).map_err(|e| Error::data(format!("column '{name}': {e}")))?
                };
                raw.push(RawColumn::Numeric(values));
            }
        }
    }

    Dataset::from_parts(schema.clone(), raw, options.standardize)
}

/// Writes a dataset as CSV: categorical codes rendered as labels, numeric
/// values optionally mapped back through the recorded standardization.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>, destandardize: bool) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(io_err)?;
    let names: Vec<&str> = dataset
        .schema()
        .columns()
        .iter()
        .map(|(n, _)| n.as_str())
        .collect();
    writer.write_record(&names).map_err(io_err)?;
    for row in 0..dataset.n_rows() {
        let mut record: Vec<String> = Vec::with_capacity(names.len());
        for col in 0..dataset.n_columns() {
            match (dataset.column(col), dataset.schema().column_kind(col)) {
                (Column::Categorical(codes), ColumnKind::Categorical { labels }) => {
                    record.push(labels[codes[row] as usize].clone());
                }
                (Column::Numeric { values, transform }, _) => {
                    let v = if destandardize {
                        transform.invert(values[row])
                    } else {
                        values[row]
                    };
                    record.push(format!("{v}"));
                }
                _ => unreachable!("schema/column kind mismatch"),
            }
        }
        writer.write_record(&record).map_err(io_err)?;
    }
    writer.flush()?;
    Ok(())
}

fn io_err(e: csv::Error) -> Error {
    Error::Data(format!("csv write failed: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn binary_column_codes_follow_label_order() {
        let schema = Schema::parse("ans,cat,no,yes\n").unwrap();
        let csv = write_temp("ans\nyes\nno\nyes\n");
        let data = load_csv(csv.path(), &schema, &LoadOptions::default()).unwrap();
        let codes: Vec<u32> = (0..3).map(|r| data.cat_code(r, 0)).collect();
        assert_eq!(codes, vec![1, 0, 1]);
    }

    #[test]
    fn unknown_label_names_row_and_column() {
        let schema = Schema::parse("ans,cat,no,yes\n").unwrap();
        let csv = write_temp("ans\nyes\nmaybe\n");
        let err = load_csv(csv.path(), &schema, &LoadOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2") && msg.contains("ans"), "{msg}");
    }

    #[test]
    fn missing_cell_errors_unless_imputed() {
        let schema = Schema::parse("x,num\n").unwrap();
        let csv = write_temp("x\n1.0\nNA\n3.0\n");
        assert!(load_csv(csv.path(), &schema, &LoadOptions::default()).is_err());
        let data = load_csv(
            csv.path(),
            &schema,
            &LoadOptions {
                impute: true,
                standardize: false,
            },
        )
        .unwrap();
        assert_eq!(data.num_value(1, 0), 2.0);
    }

    #[test]
    fn round_trip_preserves_codes_and_numerics() {
        let schema = Schema::parse("g,cat,a,b,c\nx,num\n").unwrap();
        let csv = write_temp("g,x\na,1.5\nc,-2.25\nb,0.75\nb,9.0\n");
        let data = load_csv(csv.path(), &schema, &LoadOptions::default()).unwrap();

        let out = tempfile::NamedTempFile::new().unwrap();
        write_csv(&data, out.path(), false).unwrap();
        // Re-ingest without re-standardizing; values must match to 1e-9.
        let back = load_csv(
            out.path(),
            &schema,
            &LoadOptions {
                standardize: false,
                impute: false,
            },
        )
        .unwrap();
        for row in 0..data.n_rows() {
            assert_eq!(data.cat_code(row, 0), back.cat_code(row, 0));
            assert!((data.num_value(row, 1) - back.num_value(row, 1)).abs() < 1e-9);
        }

        // Destandardized write recovers the raw values.
        let out2 = tempfile::NamedTempFile::new().unwrap();
        write_csv(&data, out2.path(), true).unwrap();
        let raw = load_csv(
            out2.path(),
            &schema,
            &LoadOptions {
                standardize: false,
                impute: false,
            },
        )
        .unwrap();
        for (row, want) in [1.5, -2.25, 0.75, 9.0].iter().enumerate() {
            let got = raw.num_value(row, 1);
            assert!(
                (got - want).abs() <= 1e-6 * want.abs().max(1.0),
                "row {row}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn quoted_labels_survive_round_trip() {
        let schema = Schema::parse("g,cat,plain,with space\nx,num\n").unwrap();
        let csv = write_temp("g,x\nwith space,1.0\nplain,2.0\n");
        let data = load_csv(csv.path(), &schema, &LoadOptions::default()).unwrap();
        assert_eq!(data.cat_code(0, 0), 1);
        let out = tempfile::NamedTempFile::new().unwrap();
        write_csv(&data, out.path(), false).unwrap();
        let back = load_csv(
            out.path(),
            &schema,
            &LoadOptions {
                standardize: false,
                impute: false,
            },
        )
        .unwrap();
        assert_eq!(back.cat_code(0, 0), 1);
    }
}
