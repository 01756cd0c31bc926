use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::env::{Action, Env, GridConfig};
use crate::obs::{fill_observation, ObsOptions, Observation};
use crate::solvers::RandomPolicy;

pub const MIN_BENCH_DURATION: Duration = Duration::from_secs(1);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub num_agents: usize,
    /// Per-agent observations delivered per second.
    pub ops: f64,
    /// Environment steps per second.
    pub sps: f64,
    pub steps: u64,
    pub observations: u64,
    pub episodes: u64,
    pub elapsed_seconds: f64,
}

/// Steps random-policy episodes back to back for `duration` on the calling
/// thread. After every step each active agent's observation is built, and
/// finished episodes are replaced by a fresh one with the next seed.
pub fn bench_speed(config: &GridConfig, duration: Duration) -> Result<BenchReport, HarnessError> {
    if duration < MIN_BENCH_DURATION {
        return Err(HarnessError::BenchTooShort(duration));
    }
    let mut episode_config = config.clone();
    let mut env = Env::new(episode_config.clone())?;
    let mut policy = RandomPolicy::new(config.seed);
    let mut actions = vec![Action::Wait; config.num_agents];
    let mut obs = Observation::default();
    let (mut steps, mut observations, mut episodes) = (0u64, 0u64, 1u64);

    let started = Instant::now();
    let mut elapsed = Duration::ZERO;
    while elapsed < duration {
        // check the clock once per batch of steps
        for _ in 0..32 {
            if env.is_done() {
                episode_config.seed = episode_config.seed.wrapping_add(1);
                env = Env::new(episode_config.clone())?;
                episodes += 1;
            }
            policy.fill(&mut actions);
            env.step(&actions)?;
            steps += 1;
            for i in 0..env.num_agents() {
                if env.is_active(i) {
                    fill_observation(&env, i, ObsOptions::default(), &mut obs).expect("active agent");
                    observations += 1;
                }
            }
        }
        elapsed = started.elapsed();
    }
    let secs = elapsed.as_secs_f64();
    Ok(BenchReport {
        num_agents: config.num_agents,
        ops: observations as f64 / secs,
        sps: steps as f64 / secs,
        steps,
        observations,
        episodes,
        elapsed_seconds: secs,
    })
}
