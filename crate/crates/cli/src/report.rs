//! Output artifacts: run-config sidecars and result CSVs.
//!
//! Result files never contain nondeterministic content; wall times and
//! progress go to stderr only. Every output directory carries a
//! `run_config.txt` sidecar with the fully resolved configuration, so a
//! rerun with the same flags reproduces every artifact byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mmm_core::select::MLEstimate;
use mmm_core::{Error, Result};

pub struct RunConfig {
    command: String,
    entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let mut out = String::new();
        let _ = writeln!(out, "command = {}", self.command);
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        fs::write(dir.join("run_config.txt"), out)?;
        Ok(())
    }
}

pub fn ensure_out_dir(path: &Path) -> Result<()> {
    if path.exists() && !path.is_dir() {
        return Err(Error::InvalidArgument(format!(
            "--out {} exists and is not a directory",
            path.display()
        )));
    }
    fs::create_dir_all(path)?;
    Ok(())
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// `row_index,cluster` assignment file, 0-based.
pub fn write_assignments(path: &Path, assignment: &[usize]) -> Result<()> {
    let mut out = String::from("row_index,cluster\n");
    for (row, &cluster) in assignment.iter().enumerate() {
        let _ = writeln!(out, "{row},{cluster}");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads an assignment file back into a label vector.
pub fn read_assignments(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == "row_index,cluster" => {}
        _ => {
            return Err(Error::Data(format!(
                "{}: expected a 'row_index,cluster' header",
                path.display()
            )))
        }
    }
    let mut labels = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (row, cluster) = line
            .split_once(',')
            .ok_or_else(|| Error::Data(format!("{}: bad line {}", path.display(), idx + 2)))?;
        let row: usize = row.trim().parse().map_err(|_| {
            Error::Data(format!(
                "{}: bad row index on line {}",
                path.display(),
                idx + 2
            ))
        })?;
        if row != labels.len() {
            return Err(Error::Data(format!(
                "{}: rows out of order at line {}",
                path.display(),
                idx + 2
            )));
        }
        labels.push(cluster.trim().parse().map_err(|_| {
            Error::Data(format!(
                "{}: bad cluster on line {}",
                path.display(),
                idx + 2
            ))
        })?);
    }
    Ok(labels)
}

fn optional(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Estimator report: one line per K.
pub fn write_estimates(path: &Path, estimates: &[MLEstimate], seed: u64) -> Result<()> {
    let mut out = String::from("k,estimator,log_ml,std_error,n_samples,seed\n");
    for e in estimates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.k,
            e.estimator.as_str(),
            e.log_ml,
            optional(e.mc_std_error),
            e.n_samples,
            seed
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Long-form metric report: dataset, method, run, metric, value, seed.
pub fn write_metrics(
    path: &Path,
    rows: &[(String, String, usize, String, f64, u64)],
) -> Result<()> {
    let mut out = String::from("dataset,method,run,metric,value,seed\n");
    for (dataset, method, run, metric, value, seed) in rows {
        let _ = writeln!(out, "{dataset},{method},{run},{metric},{value},{seed}");
    }
    fs::write(path, out)?;
    Ok(())
}
