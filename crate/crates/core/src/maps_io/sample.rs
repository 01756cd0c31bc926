use rand::Rng;
use thiserror::Error;

use crate::grid::{Components, MapGrid, Pos};
use crate::rng::{self, Stream};

/// Draws per agent before an instance is declared unsatisfiable.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("{agents} agents do not fit on {free} free cells")]
    TooManyAgents { agents: usize, free: usize },
    #[error("could not place agent {agent} after {attempts} attempts (map too crowded or fragmented)")]
    Unsatisfiable { agent: usize, attempts: usize },
}

/// Samples distinct starts and distinct goals with every goal reachable from
/// its start. Deterministic in `(map, num_agents, seed)`.
pub fn sample_instance(map: &MapGrid, num_agents: usize, seed: u64) -> Result<(Vec<Pos>, Vec<Pos>), SampleError> {
    sample_instance_with(map, &map.components(), num_agents, seed)
}

/// [`sample_instance`] with precomputed components.
pub fn sample_instance_with(
    map: &MapGrid,
    components: &Components,
    num_agents: usize,
    seed: u64,
) -> Result<(Vec<Pos>, Vec<Pos>), SampleError> {
    let free: Vec<usize> = (0..map.num_cells()).filter(|&i| !map.is_obstacle_at(i)).collect();
    if num_agents > free.len() {
        return Err(SampleError::TooManyAgents { agents: num_agents, free: free.len() });
    }
    let mut rng = rng::stream(seed, Stream::InstancePlacement);
    let mut start_used = vec![false; map.num_cells()];
    let mut goal_used = vec![false; map.num_cells()];
    let mut starts = Vec::with_capacity(num_agents);
    let mut goals = Vec::with_capacity(num_agents);
    for agent in 0..num_agents {
        let mut placed = false;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let s = free[rng.gen_range(0..free.len())];
            let g = free[rng.gen_range(0..free.len())];
            if start_used[s] || goal_used[g] || s == g || !components.same(s, g) {
                continue;
            }
            start_used[s] = true;
            goal_used[g] = true;
            starts.push(map.pos(s));
            goals.push(map.pos(g));
            placed = true;
            break;
        }
        if !placed {
            return Err(SampleError::Unsatisfiable { agent, attempts: MAX_PLACEMENT_ATTEMPTS });
        }
    }
    Ok((starts, goals))
}
