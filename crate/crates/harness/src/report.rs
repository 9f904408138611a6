//! Report assembly and output files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{HarnessError, Result};

/// A file produced by an experiment, relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(path: impl Into<String>, contents: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            contents: contents.into(),
        }
    }

    /// One JSON document per line.
    pub fn jsonl<T: Serialize>(path: impl Into<String>, items: &[T]) -> Self {
        let mut out = String::new();
        for item in items {
            out.push_str(&serde_json::to_string(item).expect("serializable"));
            out.push('\n');
        }
        Self::new(path, out)
    }
}

/// What an experiment hands back to the CLI.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub trial_seeds: Vec<u64>,
    pub trials: Value,
    pub aggregate: Value,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    pub fn new<T: Serialize, A: Serialize>(
        trial_seeds: Vec<u64>,
        trials: &T,
        aggregate: &A,
        artifacts: Vec<Artifact>,
    ) -> Self {
        Self {
            trial_seeds,
            trials: serde_json::to_value(trials).expect("serializable"),
            aggregate: serde_json::to_value(aggregate).expect("serializable"),
            artifacts,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub kind: String,
    pub software_version: String,
    pub master_seed: u64,
    pub config: Value,
    pub trial_seeds: Vec<u64>,
    pub aggregate: Value,
    pub trials: Value,
}

impl ExperimentReport {
    pub fn new(kind: &str, master_seed: u64, config: Value, outcome: &Outcome) -> Self {
        Self {
            kind: kind.to_string(),
            software_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            config,
            trial_seeds: outcome.trial_seeds.clone(),
            aggregate: outcome.aggregate.clone(),
            trials: outcome.trials.clone(),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `report.json` and every artifact under `out`.
pub fn write_outputs(
    out: &Path,
    report: &ExperimentReport,
    artifacts: &[Artifact],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut written = Vec::new();
    let report_path = out.join("report.json");
    let text = serde_json::to_string_pretty(report).expect("serializable");
    fs::write(&report_path, text).map_err(io_err(&report_path))?;
    written.push(report_path);
    for a in artifacts {
        let path = out.join(&a.path);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        fs::write(&path, &a.contents).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
