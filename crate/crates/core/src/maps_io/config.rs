use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DatasetTag, InstanceSpec, MapRegistry};
use crate::env::{CollisionSystem, OnTarget};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid YAML config: {0}")]
    Yaml(String),
    #[error("invalid JSON config: {0}")]
    Json(String),
    #[error("grid_search list for `{field}` is empty (environment block {block})")]
    EmptyGridSearch { field: &'static str, block: usize },
    #[error("algorithm alias {0:?} is used more than once")]
    DuplicateAlias(String),
    #[error("algorithm entry {0} has an empty alias")]
    EmptyAlias(usize),
    #[error("environment block {block}: {message}")]
    InvalidBlock { block: usize, message: String },
    #[error("unknown map name {name:?} in environment block {block}; register or ingest it first")]
    UnknownMap { name: String, block: usize },
}

/// A value that is either fixed or swept with `{grid_search: [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sweep<T> {
    Grid { grid_search: Vec<T> },
    Single(T),
}

impl<T> Sweep<T> {
    pub fn values(&self) -> &[T] {
        match self {
            Sweep::Grid { grid_search } => grid_search,
            Sweep::Single(v) => std::slice::from_ref(v),
        }
    }
}

impl<T> From<Vec<T>> for Sweep<T> {
    fn from(grid_search: Vec<T>) -> Self {
        Sweep::Grid { grid_search }
    }
}

fn default_obs_radius() -> usize {
    5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentBlock {
    #[serde(default = "default_dataset")]
    pub dataset: DatasetTag,
    pub map_name: Sweep<String>,
    pub num_agents: Sweep<usize>,
    pub seed: Sweep<u64>,
    pub max_episode_steps: u32,
    #[serde(default = "default_obs_radius")]
    pub obs_radius: usize,
    #[serde(default)]
    pub collision_system: CollisionSystem,
    #[serde(default)]
    pub on_target: OnTarget,
}

fn default_dataset() -> DatasetTag {
    DatasetTag::Custom
}

/// One environment block or several (each expanded in turn).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvironmentSection {
    Many(Vec<EnvironmentBlock>),
    One(EnvironmentBlock),
}

impl EnvironmentSection {
    pub fn blocks(&self) -> &[EnvironmentBlock] {
        match self {
            EnvironmentSection::Many(b) => b,
            EnvironmentSection::One(b) => std::slice::from_ref(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub alias: String,
    pub name: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

impl AlgorithmConfig {
    pub fn new(alias: impl Into<String>, name: impl Into<String>) -> Self {
        Self { alias: alias.into(), name: name.into(), params: serde_json::Value::Null }
    }

    pub fn with_params(mut self, params: serde_json::Value) -> Self {
        self.params = params;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewKind {
    #[default]
    Table,
    Plot,
}

/// A report directive: which metrics to emit, grouped by which fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewConfig {
    pub name: String,
    #[serde(default)]
    pub kind: ViewKind,
    #[serde(default)]
    pub group_by: Vec<String>,
    #[serde(default)]
    pub metrics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub algorithms: Vec<AlgorithmConfig>,
    #[serde(default)]
    pub views: Vec<ViewConfig>,
}

impl EvalConfig {
    pub fn from_yaml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_yaml::from_str(text).map_err(|e| ConfigError::Yaml(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `.json` files as JSON and anything else as YAML.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_yaml_str(&text),
        }
    }

    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (i, b) in self.environment.blocks().iter().enumerate() {
            if b.map_name.values().is_empty() {
                return Err(ConfigError::EmptyGridSearch { field: "map_name", block: i });
            }
            if b.num_agents.values().is_empty() {
                return Err(ConfigError::EmptyGridSearch { field: "num_agents", block: i });
            }
            if b.seed.values().is_empty() {
                return Err(ConfigError::EmptyGridSearch { field: "seed", block: i });
            }
            let invalid = |message: &str| ConfigError::InvalidBlock { block: i, message: message.to_string() };
            if b.max_episode_steps == 0 {
                return Err(invalid("max_episode_steps must be at least 1"));
            }
            if b.obs_radius == 0 {
                return Err(invalid("obs_radius must be at least 1"));
            }
            if b.num_agents.values().contains(&0) {
                return Err(invalid("num_agents must be at least 1"));
            }
        }
        let mut seen = BTreeSet::new();
        for (i, a) in self.algorithms.iter().enumerate() {
            if a.alias.is_empty() {
                return Err(ConfigError::EmptyAlias(i));
            }
            if !seen.insert(a.alias.as_str()) {
                return Err(ConfigError::DuplicateAlias(a.alias.clone()));
            }
        }
        Ok(())
    }

    /// Digest input: the canonical JSON encoding.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Cartesian product of every block's sweeps, in block order; within a block
/// maps vary slowest and seeds fastest.
pub fn expand_config(config: &EvalConfig, registry: &MapRegistry) -> Result<Vec<InstanceSpec>, ConfigError> {
    config.validate()?;
    let mut out = Vec::new();
    for (block_index, b) in config.environment.blocks().iter().enumerate() {
        for name in b.map_name.values() {
            if !registry.contains(name) {
                return Err(ConfigError::UnknownMap { name: name.clone(), block: block_index });
            }
            for &num_agents in b.num_agents.values() {
                for &seed in b.seed.values() {
                    out.push(InstanceSpec {
                        map_name: name.clone(),
                        seed,
                        num_agents,
                        max_episode_steps: b.max_episode_steps,
                        problem: b.on_target.problem(),
                        dataset_tag: b.dataset,
                        on_target: b.on_target,
                        collision_system: b.collision_system,
                        obs_radius: b.obs_radius,
                    });
                }
            }
        }
    }
    Ok(out)
}
