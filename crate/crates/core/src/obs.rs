//! Ego-centric observations and global state export.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::Env;
use crate::grid::{MapGrid, Pos};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ObsError {
    #[error("agent index {0} out of range")]
    NoSuchAgent(usize),
    #[error("agent {0} is inactive")]
    Inactive(usize),
}

/// Three `(2R+1) x (2R+1)` binary planes, row-major, centred on the agent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub radius: usize,
    /// 1 = obstacle or outside the map.
    pub obstacles: Vec<u8>,
    /// 1 = an active agent stands there.
    pub agents: Vec<u8>,
    /// Exactly one 1: the goal, or its projection onto the window border.
    pub target: Vec<u8>,
    pub self_position: Pos,
    pub self_goal: Pos,
}

impl Observation {
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    /// Plane value at window offset `(dr, dc)`, each in `-R..=R`.
    pub fn at(plane: &[u8], radius: usize, dr: i32, dc: i32) -> u8 {
        let side = 2 * radius as i32 + 1;
        plane[((dr + radius as i32) * side + dc + radius as i32) as usize]
    }

    /// The three planes concatenated (obstacles, agents, target).
    pub fn stacked(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(3 * self.obstacles.len());
        out.extend_from_slice(&self.obstacles);
        out.extend_from_slice(&self.agents);
        out.extend_from_slice(&self.target);
        out
    }
}

/// Whether the observing agent marks its own cell in the agents plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObsOptions {
    pub include_self: bool,
}

impl Default for ObsOptions {
    fn default() -> Self {
        Self { include_self: true }
    }
}

/// Clamps a goal offset onto the `[-R, R]^2` window.
pub fn project_offset(dr: i32, dc: i32, radius: usize) -> (i32, i32) {
    let r = radius as i32;
    (dr.clamp(-r, r), dc.clamp(-r, r))
}

pub fn extract_observation(env: &Env, agent: usize) -> Result<Observation, ObsError> {
    let mut obs = Observation::default();
    fill_observation(env, agent, ObsOptions::default(), &mut obs)?;
    Ok(obs)
}

/// Writes agent `agent`'s observation into `out`, reusing its buffers.
pub fn fill_observation(env: &Env, agent: usize, options: ObsOptions, out: &mut Observation) -> Result<(), ObsError> {
    if agent >= env.num_agents() {
        return Err(ObsError::NoSuchAgent(agent));
    }
    if !env.is_active(agent) {
        return Err(ObsError::Inactive(agent));
    }
    let radius = env.config().obs_radius;
    let r = radius as i32;
    let side = 2 * radius + 1;
    let grid = env.grid();
    let me = env.positions()[agent];
    let goal = env.goals()[agent];

    out.radius = radius;
    out.self_position = me;
    out.self_goal = goal;
    out.obstacles.clear();
    out.obstacles.resize(side * side, 1);
    out.agents.clear();
    out.agents.resize(side * side, 0);
    out.target.clear();
    out.target.resize(side * side, 0);

    let w = grid.width() as i32;
    let h = grid.height() as i32;
    let raster = grid.raster();
    let col_lo = (me.col - r).max(0);
    let col_hi = (me.col + r).min(w - 1);
    for dr in -r..=r {
        let row = me.row + dr;
        if row < 0 || row >= h {
            continue;
        }
        let base = ((dr + r) as usize) * side;
        let row_start = row as usize * grid.width();
        for col in col_lo..=col_hi {
            let k = base + (col - me.col + r) as usize;
            let cell = row_start + col as usize;
            out.obstacles[k] = raster[cell] as u8;
            if env.agent_at(Pos::new(row, col)).is_some() {
                out.agents[k] = 1;
            }
        }
    }
    let center = radius * side + radius;
    if !options.include_self {
        out.agents[center] = 0;
    }
    let (tr, tc) = project_offset(goal.row - me.row, goal.col - me.col, radius);
    out.target[((tr + r) as usize) * side + (tc + r) as usize] = 1;
    Ok(())
}

/// Snapshot of everything a centralised learner or renderer needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalState {
    #[serde(skip)]
    pub map: Option<Arc<MapGrid>>,
    pub positions: Vec<Pos>,
    pub goals: Vec<Pos>,
    pub active: Vec<bool>,
    pub step: u32,
}

impl GlobalState {
    pub fn map(&self) -> &MapGrid {
        self.map.as_deref().expect("global state carries its map")
    }
}

pub fn export_global_state(env: &Env) -> GlobalState {
    GlobalState {
        map: Some(env.grid_arc().clone()),
        positions: env.positions().to_vec(),
        goals: env.goals().to_vec(),
        active: env.active().to_vec(),
        step: env.step_count(),
    }
}
