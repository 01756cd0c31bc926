//! Map formats, the named map registry, instance sampling and eval configs.

mod ascii;
mod config;
mod movingai;
mod registry;
mod sample;
pub mod suite;

use serde::{Deserialize, Serialize};

use crate::env::{CollisionSystem, OnTarget, Problem};

pub use ascii::{parse_ascii, parse_map_file, to_ascii, to_map_file, AsciiError};
pub use config::{
    expand_config, AlgorithmConfig, ConfigError, EnvironmentBlock, EnvironmentSection, EvalConfig, Sweep, ViewConfig,
    ViewKind,
};
pub use movingai::{ingest_movingai, slice_tiles, MovingAiError};
pub use registry::{MapRegistry, RegistryError};
pub use sample::{sample_instance, sample_instance_with, SampleError, MAX_PLACEMENT_ATTEMPTS};

/// Benchmark map families used to pick which metric an episode feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetTag {
    Random,
    Mazes,
    Warehouse,
    Puzzles,
    Cities,
    CitiesTiles,
    Custom,
}

impl DatasetTag {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetTag::Random => "random",
            DatasetTag::Mazes => "mazes",
            DatasetTag::Warehouse => "warehouse",
            DatasetTag::Puzzles => "puzzles",
            DatasetTag::Cities => "cities",
            DatasetTag::CitiesTiles => "cities_tiles",
            DatasetTag::Custom => "custom",
        }
    }
}

/// One evaluation episode, before an algorithm is attached.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub map_name: String,
    pub seed: u64,
    pub num_agents: usize,
    pub max_episode_steps: u32,
    pub problem: Problem,
    pub dataset_tag: DatasetTag,
    pub on_target: OnTarget,
    pub collision_system: CollisionSystem,
    pub obs_radius: usize,
}

impl InstanceSpec {
    /// Short human-readable identity, used in error messages.
    pub fn label(&self) -> String {
        format!(
            "{}/{}/agents={}/seed={}/{:?}",
            self.dataset_tag.as_str(),
            self.map_name,
            self.num_agents,
            self.seed,
            self.problem
        )
    }
}
