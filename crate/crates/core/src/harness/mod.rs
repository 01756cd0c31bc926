//! Config-driven evaluation: episodes, suites, persistence and speed runs.

mod bench;
mod persist;
mod views;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::env::{CollisionTally, Env, EnvError, GridConfig, Problem};
use crate::grid::{Components, MapGrid};
use crate::maps_io::{expand_config, AlgorithmConfig, ConfigError, EvalConfig, InstanceSpec, MapRegistry};
use crate::obs::export_global_state;
use crate::solvers::{bfs_distances, make_policy, Policy, PolicyError};
use crate::viz::Trajectory;

pub use bench::{bench_speed, BenchReport, MIN_BENCH_DURATION};
pub use persist::{load, persist, read_records, write_records};
pub use views::{render_view, VIEW_FIELDS};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("config has no algorithms to run")]
    NoAlgorithms,
    #[error("instance {instance}: {source}")]
    Instance { instance: String, source: EnvError },
    #[error("unknown map {0:?}")]
    UnknownMap(String),
    #[error("workers must be at least 1")]
    NoWorkers,
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("benchmark duration must be at least 1 s, got {0:?}")]
    BenchTooShort(std::time::Duration),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("view {view:?}: {message}")]
    View { view: String, message: String },
}

/// Outcome of one (instance, algorithm) episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub instance: InstanceSpec,
    pub algorithm_alias: String,
    pub algorithm_name: String,
    #[serde(default)]
    pub algorithm_params: serde_json::Value,
    #[serde(rename = "SoC")]
    pub soc: u64,
    pub makespan: u32,
    pub csr: bool,
    pub goals_achieved: u64,
    pub throughput: f64,
    pub collisions: CollisionTally,
    pub runtime_seconds: f64,
    pub per_agent_goal_times: Vec<Option<u32>>,
    pub episode_length: u32,
    /// Sum of shortest-path distances; MAPF only.
    pub lower_bound_soc: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EpisodeRecord {
    /// Placeholder for an episode that could not be run.
    pub fn failed(instance: InstanceSpec, algorithm: &AlgorithmConfig, error: String) -> Self {
        Self {
            instance,
            algorithm_alias: algorithm.alias.clone(),
            algorithm_name: algorithm.name.clone(),
            algorithm_params: algorithm.params.clone(),
            soc: 0,
            makespan: 0,
            csr: false,
            goals_achieved: 0,
            throughput: 0.0,
            collisions: CollisionTally::default(),
            runtime_seconds: 0.0,
            per_agent_goal_times: Vec::new(),
            episode_length: 0,
            lower_bound_soc: None,
            error: Some(error),
        }
    }

    /// Equality ignoring `runtime_seconds`.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let mut a = self.clone();
        a.runtime_seconds = other.runtime_seconds;
        a == *other
    }
}

/// Provenance of a suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub code_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub workers: usize,
    pub instance_count: usize,
    pub algorithm_count: usize,
    pub record_count: usize,
    pub error_count: usize,
}

/// SHA-256 of the config's canonical JSON encoding, hex encoded.
pub fn config_digest(config: &EvalConfig) -> String {
    let digest = Sha256::digest(config.canonical_json().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// The episode parameters of an instance on an already-resolved map.
pub fn grid_config(spec: &InstanceSpec, map: Arc<MapGrid>) -> GridConfig {
    GridConfig {
        width: map.width(),
        height: map.height(),
        density: 0.0,
        num_agents: spec.num_agents,
        obs_radius: spec.obs_radius,
        max_episode_steps: spec.max_episode_steps,
        on_target: spec.on_target,
        collision_system: spec.collision_system,
        seed: spec.seed,
        map: Some(map),
        shared_reward: false,
    }
}

/// Runs one episode to the end. The policy is reset first.
pub fn run_instance(
    spec: &InstanceSpec,
    registry: &MapRegistry,
    algorithm: &AlgorithmConfig,
    policy: &mut dyn Policy,
) -> Result<EpisodeRecord, HarnessError> {
    let map = registry.get(&spec.map_name).ok_or_else(|| HarnessError::UnknownMap(spec.map_name.clone()))?;
    let components = Arc::new(map.components());
    run_episode(spec, map, components, algorithm, policy, false).map(|(r, _)| r)
}

/// [`run_instance`] on a resolved map, optionally recording every state.
pub fn run_episode(
    spec: &InstanceSpec,
    map: Arc<MapGrid>,
    components: Arc<Components>,
    algorithm: &AlgorithmConfig,
    policy: &mut dyn Policy,
    record: bool,
) -> Result<(EpisodeRecord, Option<Trajectory>), HarnessError> {
    let wrap = |source| HarnessError::Instance { instance: spec.label(), source };
    let config = grid_config(spec, map.clone());
    let mut env = Env::with_components(config, map.clone(), components).map_err(wrap)?;
    let lower_bound_soc = match spec.problem {
        Problem::Mapf => Some(lower_bound_soc(&env)),
        Problem::Lmapf => None,
    };
    let mut trajectory = record.then(|| Trajectory::new(map.clone()));
    if let Some(t) = trajectory.as_mut() {
        t.push(&export_global_state(&env));
    }

    policy.reset_states();
    let started = Instant::now();
    while !env.is_done() {
        let actions = policy.act(&env);
        env.step(&actions).map_err(wrap)?;
        if let Some(t) = trajectory.as_mut() {
            t.push(&export_global_state(&env));
        }
    }
    let runtime_seconds = started.elapsed().as_secs_f64().max(1e-9);

    let ind = env.episode_indicators().map_err(wrap)?;
    let record = EpisodeRecord {
        instance: spec.clone(),
        algorithm_alias: algorithm.alias.clone(),
        algorithm_name: algorithm.name.clone(),
        algorithm_params: algorithm.params.clone(),
        soc: ind.soc,
        makespan: ind.makespan,
        csr: ind.csr,
        goals_achieved: ind.goals_achieved,
        throughput: ind.throughput,
        collisions: ind.collisions,
        runtime_seconds,
        per_agent_goal_times: ind.per_agent_goal_times,
        episode_length: ind.episode_length,
        lower_bound_soc,
        error: None,
    };
    Ok((record, trajectory))
}

fn lower_bound_soc(env: &Env) -> u64 {
    let map = env.grid();
    env.positions()
        .iter()
        .zip(env.goals())
        .map(|(&s, &g)| {
            let field = bfs_distances(map, g).expect("goal cells are free");
            field.get(s).expect("sampled goals are reachable") as u64
        })
        .sum()
}

/// Runs every (instance, algorithm) pair on `workers` threads.
///
/// Records come back in canonical order: instances in expansion order, and
/// for each instance the algorithms in config order. Failed episodes become
/// records with `error` set.
pub fn run_suite(
    config: &EvalConfig,
    registry: &MapRegistry,
    workers: usize,
) -> Result<(Vec<EpisodeRecord>, RunManifest), HarnessError> {
    if workers == 0 {
        return Err(HarnessError::NoWorkers);
    }
    if config.algorithms.is_empty() {
        return Err(HarnessError::NoAlgorithms);
    }
    for alg in &config.algorithms {
        make_policy(alg)?;
    }
    let instances = expand_config(config, registry)?;
    let started_at = chrono::Utc::now();
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| HarnessError::Pool(e.to_string()))?;

    let records = pool.install(|| {
        let mut names: Vec<&str> = instances.iter().map(|s| s.map_name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        let maps: HashMap<&str, (Arc<MapGrid>, Arc<Components>)> = names
            .par_iter()
            .map(|&n| {
                let map = registry.get(n).expect("expansion checked map names");
                let comps = Arc::new(map.components());
                (n, (map, comps))
            })
            .collect();
        let jobs: Vec<(&InstanceSpec, &AlgorithmConfig)> =
            instances.iter().flat_map(|s| config.algorithms.iter().map(move |a| (s, a))).collect();
        jobs.par_iter()
            .map(|&(spec, alg)| {
                let (map, comps) = &maps[spec.map_name.as_str()];
                let mut policy = make_policy(alg).expect("algorithms validated");
                match run_episode(spec, map.clone(), comps.clone(), alg, policy.as_mut(), false) {
                    Ok((record, _)) => record,
                    Err(e) => EpisodeRecord::failed(spec.clone(), alg, e.to_string()),
                }
            })
            .collect::<Vec<_>>()
    });

    let manifest = RunManifest {
        config_digest: config_digest(config),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at: started_at.to_rfc3339(),
        finished_at: chrono::Utc::now().to_rfc3339(),
        workers,
        instance_count: instances.len(),
        algorithm_count: config.algorithms.len(),
        record_count: records.len(),
        error_count: records.iter().filter(|r| r.error.is_some()).count(),
    };
    Ok((records, manifest))
}
