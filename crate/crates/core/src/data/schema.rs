//! Plain-text schema files: one line per column, `name,kind[,labels...]`
//! with kind `cat` or `num`, plus an optional `output,<name>` line naming
//! the designated output column.

use crate::error::{Error, Result};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnKind {
    /// Categorical with labels in code order; k = labels.len() ≥ 2.
    Categorical {
        labels: Vec<String>,
    },
    Numeric,
}

impl ColumnKind {
    pub fn is_categorical(&self) -> bool {
        matches!(self, ColumnKind::Categorical { .. })
    }

    /// Number of categories; 0 for numeric columns.
    pub fn arity(&self) -> usize {
        match self {
            ColumnKind::Categorical { labels } => labels.len(),
            ColumnKind::Numeric => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    columns: Vec<(String, ColumnKind)>,
    output_index: Option<usize>,
}

impl Schema {
    pub fn new(columns: Vec<(String, ColumnKind)>, output: Option<&str>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::schema("schema has no columns"));
        }
        for (i, (name, kind)) in columns.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::schema(format!("column {i} has an empty name")));
            }
            if columns[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::schema(format!("duplicate column name '{name}'")));
            }
            if let ColumnKind::Categorical { labels } = kind {
                if labels.len() < 2 {
                    return Err(Error::schema(format!(
                        "categorical column '{name}' needs at least 2 labels"
                    )));
                }
                for (j, label) in labels.iter().enumerate() {
                    if labels[..j].contains(label) {
                        return Err(Error::schema(format!(
                            "column '{name}' repeats label '{label}'"
                        )));
                    }
                }
            }
        }
        let output_index = match output {
            None => None,
            Some(name) => Some(
                columns
                    .iter()
                    .position(|(n, _)| n == name)
                    .ok_or_else(|| Error::schema(format!("output column '{name}' not found")))?,
            ),
        };
        Ok(Schema {
            columns,
            output_index,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut columns = Vec::new();
        let mut output: Option<String> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            // "output,<name>" designates the output column, unless the second
            // field is a kind keyword (then it is a column literally named
            // "output").
            if fields.len() == 2
                && fields[0] == "output"
                && fields[1] != "cat"
                && fields[1] != "num"
            {
                if output.is_some() {
                    return Err(Error::schema(format!(
                        "line {}: output column designated twice",
                        lineno + 1
                    )));
                }
                output = Some(fields[1].to_string());
                continue;
            }
            if fields.len() < 2 {
                return Err(Error::schema(format!(
                    "line {}: expected 'name,kind[,labels...]'",
                    lineno + 1
                )));
            }
            let name = fields[0].to_string();
            let kind = match fields[1] {
                "num" => {
                    if fields.len() > 2 {
                        return Err(Error::schema(format!(
                            "line {}: numeric column '{name}' does not take labels",
                            lineno + 1
                        )));
                    }
                    ColumnKind::Numeric
                }
                "cat" => {
                    let labels: Vec<String> = fields[2..].iter().map(|s| s.to_string()).collect();
                    if labels.len() < 2 {
                        return Err(Error::schema(format!(
                            "line {}: categorical column '{name}' needs at least 2 labels",
                            lineno + 1
                        )));
                    }
                    ColumnKind::Categorical { labels }
                }
                other => {
                    return Err(Error::schema(format!(
                        "line {}: unknown kind '{other}' (expected 'cat' or 'num')",
                        lineno + 1
                    )));
                }
            };
            columns.push((name, kind));
        }
        Schema::new(columns, output.as_deref())
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Schema::parse(&text)
    }

    /// Renders the schema in the same plain-text format `parse` accepts.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, kind) in &self.columns {
            match kind {
                ColumnKind::Numeric => out.push_str(&format!("{name},num\n")),
                ColumnKind::Categorical { labels } => {
                    out.push_str(&format!("{name},cat,{}\n", labels.join(",")))
                }
            }
        }
        if let Some(idx) = self.output_index {
            out.push_str(&format!("output,{}\n", self.columns[idx].0));
        }
        out
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.render())?;
        Ok(())
    }

    pub fn columns(&self) -> &[(String, ColumnKind)] {
        &self.columns
    }

    pub fn column_name(&self, idx: usize) -> &str {
        &self.columns[idx].0
    }

    pub fn column_kind(&self, idx: usize) -> &ColumnKind {
        &self.columns[idx].1
    }

    pub fn output_index(&self) -> Option<usize> {
        self.output_index
    }

    pub fn without_column(&self, col: usize) -> Result<Schema> {
        if col >= self.columns.len() {
            return Err(Error::invalid(format!("no column {col} to drop")));
        }
        let mut columns = self.columns.clone();
        columns.remove(col);
        let output_index = match self.output_index {
            Some(o) if o == col => None,
            Some(o) if o > col => Some(o - 1),
            other => other,
        };
        let output_name = output_index.map(|o| columns[o].0.clone());
        Schema::new(columns, output_name.as_deref())
    }
}
