//! The JSON experiment configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{
    build_complete_cyclic, build_cyclic, build_dihedral, build_hypercube, load_group, Cayley,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Gap,
    Compare,
    SRecursion,
    ContractSimplex,
    ContractMatrix,
    IdentityMatrix,
    CoupleSimplex,
    CoupleMatrix,
    Connect,
    Largeness,
    LowerboundSimplex,
    LowerboundMatrix,
    Oracle,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Gap => "gap",
            Experiment::Compare => "compare",
            Experiment::SRecursion => "s-recursion",
            Experiment::ContractSimplex => "contract-simplex",
            Experiment::ContractMatrix => "contract-matrix",
            Experiment::IdentityMatrix => "identity-matrix",
            Experiment::CoupleSimplex => "couple-simplex",
            Experiment::CoupleMatrix => "couple-matrix",
            Experiment::Connect => "connect",
            Experiment::Largeness => "largeness",
            Experiment::LowerboundSimplex => "lowerbound-simplex",
            Experiment::LowerboundMatrix => "lowerbound-matrix",
            Experiment::Oracle => "oracle",
        }
    }
}

/// Which Cayley graph to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic { n: usize, gens: Vec<i64> },
    Complete { n: usize },
    Hypercube { k: usize },
    Dihedral { k: usize },
    File { path: PathBuf },
}

impl GroupSpec {
    pub fn build(&self) -> Result<Cayley> {
        match self {
            GroupSpec::Cyclic { n, gens } => build_cyclic(*n, gens),
            GroupSpec::Complete { n } => build_complete_cyclic(*n),
            GroupSpec::Hypercube { k } => build_hypercube(*k),
            GroupSpec::Dihedral { k } => build_dihedral(*k),
            GroupSpec::File { path } => load_group(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory receiving the manifest and result files.
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

/// Threshold names accepted in `thresholds`.
pub const THRESHOLD_NAMES: [&str; 8] = ["epsilon", "C", "a", "b", "f", "k", "d", "c"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(rename = "T1", default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<usize>,
    #[serde(rename = "T2", default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<usize>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    /// Oracle suite name, for `experiment = "oracle"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
}

fn default_replicas() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            group: None,
            n: None,
            t: None,
            t1: None,
            t2: None,
            replicas: 1,
            seed: 0,
            thresholds: BTreeMap::new(),
            output: None,
            suite: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be >= 1".into()));
        }
        if let Some(bad) = self
            .thresholds
            .keys()
            .find(|k| !THRESHOLD_NAMES.contains(&k.as_str()))
        {
            return Err(Error::Config(format!(
                "unknown threshold {bad:?}; expected one of {THRESHOLD_NAMES:?}"
            )));
        }
        if let Some((name, v)) = self.thresholds.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("threshold {name} is not finite: {v}")));
        }
        use Experiment::*;
        let needs_group = matches!(
            self.experiment,
            Gap | Compare | SRecursion | ContractSimplex | CoupleSimplex | LowerboundSimplex
        );
        let needs_n = matches!(
            self.experiment,
            ContractMatrix | IdentityMatrix | CoupleMatrix | Largeness | LowerboundMatrix
        );
        if needs_group && self.group.is_none() {
            return Err(Error::Config(format!("{} needs a group", self.experiment.name())));
        }
        if needs_n && self.n.is_none() {
            return Err(Error::Config(format!("{} needs n", self.experiment.name())));
        }
        if self.experiment == Connect && self.group.is_none() && self.n.is_none() {
            return Err(Error::Config("connect needs a group or n".into()));
        }
        if self.experiment == Oracle && self.suite.is_none() {
            return Err(Error::Config("oracle needs a suite".into()));
        }
        Ok(())
    }

    pub fn threshold(&self, name: &str, default: f64) -> f64 {
        self.thresholds.get(name).copied().unwrap_or(default)
    }

    pub fn cayley(&self) -> Result<Cayley> {
        self.group
            .as_ref()
            .ok_or_else(|| Error::Config("missing group".into()))?
            .build()
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }
}
