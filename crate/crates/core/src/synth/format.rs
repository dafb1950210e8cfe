//! Versioned plain-text serialization of generator models (key = value
//! sections per cluster), so generation can rerun without refitting.

use std::fmt::Write as _;
use std::path::Path;

use crate::data::{Schema, Standardization};
use crate::error::{Error, Result};
use crate::synth::{
    ClusterColumnModel, ColumnModel, GeneratorModel, LinearOutputModel, OutputKind, OutputLink,
};

const MAGIC: &str = "mmm-generator-v1";

fn render(model: &GeneratorModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "k = {}", model.k);
    let _ = writeln!(out, "seed = {}", model.seed);
    let _ = writeln!(out, "criterion = {}", model.criterion);
    let _ = writeln!(out, "output_index = {}", model.output_index);
    let _ = writeln!(out, "[schema]");
    for line in model.schema.render().lines() {
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "[standardization]");
    for (c, t) in model.standardization.iter().enumerate() {
        match t {
            Some(s) => {
                let _ = writeln!(out, "col.{c} = {} {}", s.mean, s.std);
            }
            None => {
                let _ = writeln!(out, "col.{c} = -");
            }
        }
    }
    for (j, (cc, output)) in model
        .cluster_columns
        .iter()
        .zip(&model.cluster_outputs)
        .enumerate()
    {
        let _ = writeln!(out, "[cluster {j}]");
        let _ = writeln!(out, "size = {}", model.cluster_sizes[j]);
        for (c, cm) in cc.columns.iter().enumerate() {
            match cm {
                ColumnModel::Categorical { probs } => {
                    let rendered: Vec<String> = probs.iter().map(|p| p.to_string()).collect();
                    let _ = writeln!(out, "col.{c} = cat {}", rendered.join(" "));
                }
                ColumnModel::Numeric { mean, std } => {
                    let _ = writeln!(out, "col.{c} = num {mean} {std}");
                }
            }
        }
        let kind = match output.kind {
            OutputKind::Numeric => "numeric",
            OutputKind::Binary => "binary",
        };
        let link = match output.link {
            OutputLink::Linear => "linear",
            OutputLink::Logistic => "logistic",
        };
        let _ = writeln!(out, "output = {kind} {link}");
        let rendered: Vec<String> = output.weights.iter().map(|w| w.to_string()).collect();
        let _ = writeln!(out, "output.weights = {}", rendered.join(" "));
        let _ = writeln!(out, "output.intercept = {}", output.intercept);
        let _ = writeln!(out, "output.residual_std = {}", output.residual_std);
    }
    out
}

pub fn save_model(model: &GeneratorModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), render(model))?;
    Ok(())
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::data(format!("generator model line {line}: {msg}"))
}

fn parse_f64(line: usize, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| bad(line, format!("cannot parse '{s}' as a number")))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GeneratorModel> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == MAGIC => {}
        _ => return Err(Error::data(format!("not a {MAGIC} file"))),
    }

    let mut k: Option<usize> = None;
    let mut seed: Option<u64> = None;
    let mut criterion = String::new();
    let mut output_index: Option<usize> = None;
    let mut schema_lines = String::new();
    let mut standardization: Vec<Option<Standardization>> = Vec::new();
    let mut cluster_sizes: Vec<usize> = Vec::new();
    let mut cluster_columns: Vec<ClusterColumnModel> = Vec::new();
    let mut cluster_outputs: Vec<Vec<(String, String)>> = Vec::new();

    #[derive(PartialEq)]
    enum Section {
        Header,
        Schema,
        Standardization,
        Cluster,
    }
    let mut section = Section::Header;

    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "[schema]" {
            section = Section::Schema;
            continue;
        }
        if line == "[standardization]" {
            section = Section::Standardization;
            continue;
        }
        if line.starts_with("[cluster ") && line.ends_with(']') {
            section = Section::Cluster;
            cluster_sizes.push(0);
            cluster_columns.push(ClusterColumnModel {
                columns: Vec::new(),
            });
            cluster_outputs.push(Vec::new());
            continue;
        }
        if section == Section::Schema {
            schema_lines.push_str(line);
            schema_lines.push('\n');
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(a, b)| (a.trim(), b.trim()))
            .ok_or_else(|| bad(lineno, "expected 'key = value'"))?;
        match section {
            Section::Header => match key {
                "k" => k = Some(value.parse().map_err(|_| bad(lineno, "bad k"))?),
                "seed" => seed = Some(value.parse().map_err(|_| bad(lineno, "bad seed"))?),
                "criterion" => criterion = value.to_string(),
                "output_index" => {
                    output_index = Some(value.parse().map_err(|_| bad(lineno, "bad output_index"))?)
                }
                other => return Err(bad(lineno, format!("unknown header key '{other}'"))),
            },
            Section::Standardization => {
                if value == "-" {
                    standardization.push(None);
                } else {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(bad(lineno, "expected 'mean std'"));
                    }
                    standardization.push(Some(Standardization {
                        mean: parse_f64(lineno, parts[0])?,
                        std: parse_f64(lineno, parts[1])?,
                    }));
                }
            }
            Section::Cluster => {
                let j = cluster_sizes.len() - 1;
                if key == "size" {
                    cluster_sizes[j] = value.parse().map_err(|_| bad(lineno, "bad size"))?;
                } else if key.starts_with("col.") {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    match parts.first() {
                        Some(&"cat") => {
                            let probs = parts[1..]
                                .iter()
                                .map(|p| parse_f64(lineno, p))
                                .collect::<Result<Vec<f64>>>()?;
                            cluster_columns[j]
                                .columns
                                .push(ColumnModel::Categorical { probs });
                        }
                        Some(&"num") => {
                            if parts.len() != 3 {
                                return Err(bad(lineno, "expected 'num mean std'"));
                            }
                            cluster_columns[j].columns.push(ColumnModel::Numeric {
                                mean: parse_f64(lineno, parts[1])?,
                                std: parse_f64(lineno, parts[2])?,
                            });
                        }
                        _ => return Err(bad(lineno, "column model must be 'cat' or 'num'")),
                    }
                } else {
                    cluster_outputs[j].push((key.to_string(), value.to_string()));
                }
            }
            Section::Schema => unreachable!("handled above"),
        }
    }

    let k = k.ok_or_else(|| Error::data("generator model missing k"))?;
    let seed = seed.ok_or_else(|| Error::data("generator model missing seed"))?;
    let output_index =
        output_index.ok_or_else(|| Error::data("generator model missing output_index"))?;
    let schema = Schema::parse(&schema_lines)?;

    let mut outputs = Vec::with_capacity(cluster_outputs.len());
    for (j, pairs) in cluster_outputs.iter().enumerate() {
        let get = |name: &str| -> Result<&str> {
            pairs
                .iter()
                .find(|(key, _)| key == name)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::data(format!("cluster {j}: missing '{name}'")))
        };
        let header = get("output")?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::data(format!("cluster {j}: bad output header")));
        }
        let kind = match parts[0] {
            "numeric" => OutputKind::Numeric,
            "binary" => OutputKind::Binary,
            other => {
                return Err(Error::data(format!(
                    "cluster {j}: bad output kind '{other}'"
                )))
            }
        };
        let link = match parts[1] {
            "linear" => OutputLink::Linear,
            "logistic" => OutputLink::Logistic,
            other => {
                return Err(Error::data(format!(
                    "cluster {j}: bad output link '{other}'"
                )))
            }
        };
        let weights = get("output.weights")?
            .split_whitespace()
            .map(|w| {
                w.parse::<f64>()
                    .map_err(|_| Error::data(format!("cluster {j}: bad weight '{w}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let intercept = get("output.intercept")?
            .parse::<f64>()
            .map_err(|_| Error::data(format!("cluster {j}: bad intercept")))?;
        let residual_std = get("output.residual_std")?
            .parse::<f64>()
            .map_err(|_| Error::data(format!("cluster {j}: bad residual_std")))?;
        outputs.push(LinearOutputModel {
            weights,
            intercept,
            residual_std,
            kind,
            link,
        });
    }

    Ok(GeneratorModel {
        schema,
        standardization,
        output_index,
        cluster_sizes,
        cluster_columns,
        cluster_outputs: outputs,
        k,
        seed,
        criterion,
    })
}
