//! Benchmark configuration, read from JSON.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use submax_core::{parse, random_instance, Instance, InstanceKind, RandomParams};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    /// The recursive algorithm with the given number of rounds.
    Alg(usize),
    Ls,
    DgDet,
    DgRand,
    Brute,
}

impl Algorithm {
    pub fn uses_epsilon(self) -> bool {
        matches!(self, Algorithm::Alg(_) | Algorithm::Ls)
    }

    pub fn depth(self) -> Option<usize> {
        match self {
            Algorithm::Alg(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Alg(d) => write!(f, "alg@{d}"),
            Algorithm::Ls => f.write_str("ls"),
            Algorithm::DgDet => f.write_str("dg-det"),
            Algorithm::DgRand => f.write_str("dg-rand"),
            Algorithm::Brute => f.write_str("brute"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ls" => Algorithm::Ls,
            "dg-det" => Algorithm::DgDet,
            "dg-rand" => Algorithm::DgRand,
            "brute" => Algorithm::Brute,
            "alg" => Algorithm::Alg(2),
            other => match other.strip_prefix("alg@").map(str::parse) {
                Some(Ok(d)) => Algorithm::Alg(d),
                _ => return Err(BenchError::config(format!("unknown algorithm {other:?}"))),
            },
        })
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
    Json,
}

impl FromStr for OutputFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            "json" => Ok(OutputFormat::Json),
            other => Err(BenchError::config(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: InstanceKind,
    pub m: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: RandomParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    File(PathBuf),
    Generate(GeneratorSpec),
    /// An instance object in the file format, embedded in the config.
    Inline(serde_json::Value),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub kind: SourceKind,
}

impl InstanceSource {
    pub fn generate(spec: GeneratorSpec) -> Self {
        InstanceSource {
            id: None,
            kind: SourceKind::Generate(spec),
        }
    }

    pub fn file(path: impl Into<PathBuf>) -> Self {
        InstanceSource {
            id: None,
            kind: SourceKind::File(path.into()),
        }
    }

    pub fn inline(id: impl Into<String>, inst: &Instance) -> Self {
        InstanceSource {
            id: Some(id.into()),
            kind: SourceKind::Inline(
                serde_json::from_str(&submax_core::serialize(inst)).expect("instance JSON is valid"),
            ),
        }
    }

    /// Resolves to `(id, instance)`; relative paths are taken from `base_dir`.
    pub fn load(&self, index: usize, base_dir: &Path) -> Result<(String, Instance)> {
        let (default_id, inst) = match &self.kind {
            SourceKind::File(path) => {
                let full = if path.is_absolute() {
                    path.clone()
                } else {
                    base_dir.join(path)
                };
                let text = std::fs::read_to_string(&full).map_err(|source| BenchError::Io {
                    path: full.clone(),
                    source,
                })?;
                let inst =
                    parse(&text).map_err(|e| BenchError::config(format!("instance file {}: {e}", full.display())))?;
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
                (stem.unwrap_or_else(|| format!("file-{index}")), inst)
            }
            SourceKind::Generate(g) => {
                let inst = random_instance(g.kind, g.m, g.seed, &g.params)
                    .map_err(|e| BenchError::config(format!("instance source #{index} ({}): {e}", g.kind)))?;
                (format!("{}-m{}-s{}", g.kind, g.m, g.seed), inst)
            }
            SourceKind::Inline(value) => {
                let inst = parse(&value.to_string())
                    .map_err(|e| BenchError::config(format!("inline instance #{index}: {e}")))?;
                (format!("inline-{index}"), inst)
            }
        };
        Ok((self.id.clone().unwrap_or(default_id), inst))
    }
}

fn default_epsilons() -> Vec<f64> {
    vec![0.05]
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub instances: Vec<InstanceSource>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    /// Runs of the randomized baseline per instance.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub verify: bool,
    /// Append wall-clock columns (excluded from determinism guarantees).
    #[serde(default)]
    pub timing: bool,
    /// Embed recursion traces in JSON output.
    #[serde(default)]
    pub traces: bool,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: BenchConfig = serde_json::from_str(text).map_err(|e| BenchError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() {
            return Err(BenchError::config("at least one instance source is required"));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::config("at least one algorithm is required"));
        }
        if self.algorithms.iter().any(|a| a.uses_epsilon()) && self.epsilons.is_empty() {
            return Err(BenchError::config("epsilon list is empty"));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(BenchError::config(format!("epsilon values must be > 0, got {e}")));
        }
        if self.algorithms.contains(&Algorithm::DgRand) && self.trials == 0 {
            return Err(BenchError::config("dg-rand needs trials >= 1"));
        }
        Ok(())
    }
}
