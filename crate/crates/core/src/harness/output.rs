//! Result records, their CSV / JSON-lines encodings, and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, Format};
use crate::coupling::{CouplingOutcome, FailureKind};
use crate::error::Result;

/// One statistic: `t` and `replica` are empty for whole-run aggregates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub t: Option<usize>,
    pub replica: Option<usize>,
    pub statistic_name: String,
    pub value: f64,
}

impl Row {
    pub fn stat(name: impl Into<String>, value: f64) -> Self {
        Row {
            t: None,
            replica: None,
            statistic_name: name.into(),
            value,
        }
    }

    pub fn at(t: usize, name: impl Into<String>, value: f64) -> Self {
        Row {
            t: Some(t),
            ..Row::stat(name, value)
        }
    }

    pub fn replica(t: Option<usize>, replica: usize, name: impl Into<String>, value: f64) -> Self {
        Row {
            t,
            replica: Some(replica),
            ..Row::stat(name, value)
        }
    }
}

#[derive(Debug, Clone)]
pub enum Records {
    Rows(Vec<Row>),
    Outcomes(Vec<CouplingOutcome>),
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn kind(k: &Option<FailureKind>) -> String {
    k.map(|k| format!("{k:?}")).unwrap_or_default()
}

pub const ROW_HEADER: &str = "t,replica,statistic_name,value";
pub const OUTCOME_HEADER: &str = "replica,coupled,failure_kind,first_failure_time,tau_connect,max_final_gap,connected,subset_couplings,subset_failures,max_w_gap";

impl Records {
    pub fn len(&self) -> usize {
        match self {
            Records::Rows(r) => r.len(),
            Records::Outcomes(o) => o.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn encode(&self, format: Format) -> Result<String> {
        let mut out = String::new();
        match (self, format) {
            (Records::Rows(rows), Format::Csv) => {
                out.push_str(ROW_HEADER);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        opt(&r.t),
                        opt(&r.replica),
                        r.statistic_name,
                        r.value
                    ));
                }
            }
            (Records::Outcomes(os), Format::Csv) => {
                out.push_str(OUTCOME_HEADER);
                out.push('\n');
                for o in os {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        o.replica,
                        o.coupled,
                        kind(&o.failure_kind),
                        opt(&o.first_failure_time),
                        opt(&o.tau_connect),
                        o.max_final_gap,
                        o.connected,
                        o.subset_couplings,
                        o.subset_failures,
                        o.max_w_gap
                    ));
                }
            }
            (Records::Rows(rows), Format::Jsonl) => {
                for r in rows {
                    out.push_str(&serde_json::to_string(r).map_err(|e| crate::Error::Io(e.to_string()))?);
                    out.push('\n');
                }
            }
            (Records::Outcomes(os), Format::Jsonl) => {
                for o in os {
                    out.push_str(&serde_json::to_string(o).map_err(|e| crate::Error::Io(e.to_string()))?);
                    out.push('\n');
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Running,
    Complete,
    Failed,
}

/// Written before any result; `status` stays `running` if the process dies.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub status: RunStatus,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    /// `derive_seed(seed, i)` for each replica index `i`.
    pub derived_seeds: Vec<u64>,
    pub version: String,
    pub started_unix_ms: u128,
    pub wall_clock_seconds: Option<f64>,
    pub outputs: Vec<String>,
    pub assertions_passed: Option<bool>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    f.sync_all()?;
    Ok(())
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest).map_err(|e| crate::Error::Io(e.to_string()))?;
    write_file(&path, &(text + "\n"))?;
    Ok(path)
}
