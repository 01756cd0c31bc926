//! Grid world state and simultaneous-move dynamics.
//!
//! An [`Env`] holds one episode. Each [`Env::step`] takes one [`Action`] per
//! agent, shields illegal and conflicting moves (see [`resolve`]), hands out
//! rewards and advances the step counter. What happens on goal arrival is
//! selected by [`OnTarget`]:
//!
//! * `Nothing` - classical MAPF, agents stay on their goal;
//! * `Disappear` - classical MAPF, agents leave the grid on arrival;
//! * `Restart` - lifelong MAPF, a fresh goal is drawn immediately.

pub mod resolve;

use std::ops::{Add, AddAssign};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Components, MapError, MapGrid, Pos};
use crate::mapgen::{self, MapGenError};
use crate::maps_io::{self, SampleError};
use crate::rng::{self, Stream};

pub use resolve::{resolve_moves, MoveResolver};

const NO_AGENT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnTarget {
    #[default]
    Nothing,
    Restart,
    Disappear,
}

impl OnTarget {
    pub fn problem(self) -> Problem {
        match self {
            OnTarget::Restart => Problem::Lmapf,
            OnTarget::Nothing | OnTarget::Disappear => Problem::Mapf,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionSystem {
    BlockAll,
    #[default]
    Soft,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Mapf,
    Lmapf,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Action {
    #[default]
    Wait,
    Up,
    Down,
    Left,
    Right,
}

impl Action {
    pub const ALL: [Action; 5] = [Action::Wait, Action::Up, Action::Down, Action::Left, Action::Right];

    /// `(d_row, d_col)` of the move.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Action::Wait => (0, 0),
            Action::Up => (-1, 0),
            Action::Down => (1, 0),
            Action::Left => (0, -1),
            Action::Right => (0, 1),
        }
    }

    pub fn apply(self, p: Pos) -> Pos {
        let (dr, dc) = self.delta();
        p.offset(dr, dc)
    }

    /// The action leading from `from` to the adjacent (or equal) cell `to`.
    pub fn between(from: Pos, to: Pos) -> Option<Action> {
        Action::ALL.into_iter().find(|a| a.apply(from) == to)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }
}

/// Collision events, one per blocked or reverted agent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CollisionTally {
    pub obstacle: u64,
    pub vertex: u64,
    pub edge: u64,
}

impl CollisionTally {
    pub fn total(&self) -> u64 {
        self.obstacle + self.vertex + self.edge
    }
}

impl Add for CollisionTally {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self { obstacle: self.obstacle + rhs.obstacle, vertex: self.vertex + rhs.vertex, edge: self.edge + rhs.edge }
    }
}

impl AddAssign for CollisionTally {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Full episode parameterisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub width: usize,
    pub height: usize,
    /// Obstacle probability for generated maps.
    pub density: f64,
    pub num_agents: usize,
    pub obs_radius: usize,
    pub max_episode_steps: u32,
    pub on_target: OnTarget,
    pub collision_system: CollisionSystem,
    pub seed: u64,
    /// Fixed map; overrides `width`, `height` and `density`.
    #[serde(skip)]
    pub map: Option<Arc<MapGrid>>,
    pub shared_reward: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            width: 8,
            height: 8,
            density: 0.3,
            num_agents: 1,
            obs_radius: 5,
            max_episode_steps: 64,
            on_target: OnTarget::Nothing,
            collision_system: CollisionSystem::Soft,
            seed: 0,
            map: None,
            shared_reward: false,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if !(0.0..1.0).contains(&self.density) {
            return Err(EnvError::InvalidConfig(format!("density must be in [0, 1), got {}", self.density)));
        }
        if self.num_agents == 0 {
            return Err(EnvError::InvalidConfig("num_agents must be at least 1".into()));
        }
        if self.obs_radius == 0 {
            return Err(EnvError::InvalidConfig("obs_radius must be at least 1".into()));
        }
        if self.max_episode_steps == 0 {
            return Err(EnvError::InvalidConfig("max_episode_steps must be at least 1".into()));
        }
        if self.map.is_none() && (self.width < 2 || self.height < 2) {
            return Err(EnvError::InvalidConfig(format!("map size {}x{} is below 2x2", self.width, self.height)));
        }
        Ok(())
    }

    pub fn problem(&self) -> Problem {
        self.on_target.problem()
    }
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    MapGen(#[from] MapGenError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("expected {expected} {what}, got {got}")]
    CountMismatch { what: &'static str, expected: usize, got: usize },
    #[error("{what} of agent {agent} at {pos} is not a free cell")]
    NotFree { what: &'static str, agent: usize, pos: Pos },
    #[error("agents {first} and {second} share the start cell {pos}")]
    DuplicateStart { first: usize, second: usize, pos: Pos },
    #[error("agents {first} and {second} share the goal cell {pos}")]
    DuplicateGoal { first: usize, second: usize, pos: Pos },
    #[error("unreachable goal: agent {agent} cannot reach {goal} from {start}")]
    UnreachableGoal { agent: usize, start: Pos, goal: Pos },
    #[error("{agents} agents do not fit on {free} free cells")]
    TooManyAgents { agents: usize, free: usize },
    #[error("episode is over")]
    EpisodeOver,
    #[error("episode is still running")]
    EpisodeRunning,
}

/// Result of one [`Env::step`].
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    /// Individual rewards, or the shared reward repeated per agent when
    /// [`GridConfig::shared_reward`] is set.
    pub rewards: Vec<f64>,
    /// Goals reached by all agents during this step.
    pub goals_reached: u32,
    pub terminated: bool,
    pub truncated: bool,
    pub collisions: CollisionTally,
}

impl StepOutcome {
    pub fn shared_reward(&self) -> f64 {
        self.goals_reached as f64 / self.rewards.len() as f64
    }
}

/// Primary indicators of a finished episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeIndicators {
    /// Sum of first-arrival times; unsolved agents count `max_episode_steps`.
    pub soc: u64,
    pub makespan: u32,
    /// Every agent reached its (first) goal.
    pub csr: bool,
    pub goals_achieved: u64,
    /// `goals_achieved / max_episode_steps`.
    pub throughput: f64,
    pub collisions: CollisionTally,
    pub per_agent_goal_times: Vec<Option<u32>>,
    /// Steps actually simulated.
    pub episode_length: u32,
}

/// One episode of the simulator.
#[derive(Clone, Debug)]
pub struct Env {
    config: GridConfig,
    grid: Arc<MapGrid>,
    components: Arc<Components>,
    positions: Vec<Pos>,
    goals: Vec<Pos>,
    active: Vec<bool>,
    step: u32,
    goal_time: Vec<Option<u32>>,
    goals_achieved: u64,
    collisions: CollisionTally,
    goal_rng: ChaCha8Rng,
    terminated: bool,
    truncated: bool,
    occupancy: Vec<u32>,
    resolver: MoveResolver,
    targets: Vec<Pos>,
}

/// Builds an episode. Missing starts/goals are sampled with the config seed;
/// a missing map is generated from `width`, `height` and `density`.
pub fn create_env(
    config: GridConfig,
    map: Option<Arc<MapGrid>>,
    starts: Option<Vec<Pos>>,
    goals: Option<Vec<Pos>>,
) -> Result<Env, EnvError> {
    config.validate()?;
    let grid = match map.or_else(|| config.map.clone()) {
        Some(m) => m,
        None => Arc::new(mapgen::gen_random(config.width, config.height, config.density, config.seed)?),
    };
    let components = Arc::new(grid.components());
    Env::assemble(config, grid, components, starts, goals)
}

impl Env {
    /// [`create_env`] with everything derived from the config.
    pub fn new(config: GridConfig) -> Result<Self, EnvError> {
        create_env(config, None, None, None)
    }

    /// Builds an episode on a map whose components were already labelled.
    pub fn with_components(
        config: GridConfig,
        grid: Arc<MapGrid>,
        components: Arc<Components>,
    ) -> Result<Self, EnvError> {
        config.validate()?;
        Self::assemble(config, grid, components, None, None)
    }

    fn assemble(
        mut config: GridConfig,
        grid: Arc<MapGrid>,
        components: Arc<Components>,
        starts: Option<Vec<Pos>>,
        goals: Option<Vec<Pos>>,
    ) -> Result<Self, EnvError> {
        let n = config.num_agents;
        let free = grid.num_free();
        if n > free {
            return Err(EnvError::TooManyAgents { agents: n, free });
        }
        let (starts, goals) = match (starts, goals) {
            (Some(s), Some(g)) => (s, g),
            (s, g) => {
                let (ss, gg) = maps_io::sample_instance_with(&grid, &components, n, config.seed)?;
                (s.unwrap_or(ss), g.unwrap_or(gg))
            }
        };
        check_placement(&grid, &components, n, &starts, &goals)?;
        config.map = Some(grid.clone());

        let mut env = Env {
            resolver: MoveResolver::new(&grid),
            occupancy: vec![NO_AGENT; grid.num_cells()],
            goal_rng: rng::stream(config.seed, Stream::GoalRefresh),
            positions: starts,
            goals,
            active: vec![true; n],
            step: 0,
            goal_time: vec![None; n],
            goals_achieved: 0,
            collisions: CollisionTally::default(),
            terminated: false,
            truncated: false,
            targets: vec![Pos::default(); n],
            config,
            grid,
            components,
        };
        for i in 0..n {
            let c = env.grid.index(env.positions[i]);
            env.occupancy[c] = i as u32;
        }
        // An agent created on its own goal has arrived at t = 0.
        for i in 0..n {
            if env.positions[i] == env.goals[i] {
                env.on_arrival(i);
            }
        }
        env.terminated = env.config.problem() == Problem::Mapf && env.goal_time.iter().all(Option::is_some);
        Ok(env)
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn grid(&self) -> &MapGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<MapGrid> {
        &self.grid
    }

    pub fn num_agents(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Pos] {
        &self.positions
    }

    pub fn goals(&self) -> &[Pos] {
        &self.goals
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn is_active(&self, agent: usize) -> bool {
        self.active[agent]
    }

    pub fn step_count(&self) -> u32 {
        self.step
    }

    pub fn goal_times(&self) -> &[Option<u32>] {
        &self.goal_time
    }

    pub fn goals_achieved(&self) -> u64 {
        self.goals_achieved
    }

    pub fn collisions(&self) -> CollisionTally {
        self.collisions
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_done(&self) -> bool {
        self.terminated || self.truncated
    }

    /// Index of the active agent standing on `p`, if any.
    #[inline]
    pub fn agent_at(&self, p: Pos) -> Option<usize> {
        if !self.grid.in_bounds(p) {
            return None;
        }
        let a = self.occupancy[self.grid.index(p)];
        (a != NO_AGENT).then_some(a as usize)
    }

    /// Advances the episode by one simultaneous step.
    pub fn step(&mut self, actions: &[Action]) -> Result<StepOutcome, EnvError> {
        if self.is_done() {
            return Err(EnvError::EpisodeOver);
        }
        let n = self.num_agents();
        if actions.len() != n {
            return Err(EnvError::CountMismatch { what: "actions", expected: n, got: actions.len() });
        }
        for i in 0..n {
            self.targets[i] = if self.active[i] { actions[i].apply(self.positions[i]) } else { self.positions[i] };
        }
        let delta = self.resolver.resolve(
            &self.grid,
            &self.positions,
            &mut self.targets,
            &self.active,
            self.config.collision_system,
        );
        self.collisions += delta;

        for i in 0..n {
            if self.active[i] && self.targets[i] != self.positions[i] {
                let c = self.grid.index(self.positions[i]);
                self.occupancy[c] = NO_AGENT;
            }
        }
        for i in 0..n {
            if self.active[i] && self.targets[i] != self.positions[i] {
                let c = self.grid.index(self.targets[i]);
                self.occupancy[c] = i as u32;
                self.positions[i] = self.targets[i];
            }
        }
        self.step += 1;

        let mut rewards = vec![0.0; n];
        let mut reached = 0u32;
        for i in 0..n {
            if self.active[i] && self.positions[i] == self.goals[i] && self.on_arrival(i) {
                rewards[i] = 1.0;
                reached += 1;
            }
        }
        if self.config.shared_reward {
            rewards.fill(reached as f64 / n as f64);
        }

        if self.config.problem() == Problem::Mapf && self.goal_time.iter().all(Option::is_some) {
            self.terminated = true;
        } else if self.step >= self.config.max_episode_steps {
            self.truncated = true;
        }

        Ok(StepOutcome {
            rewards,
            goals_reached: reached,
            terminated: self.terminated,
            truncated: self.truncated,
            collisions: delta,
        })
    }

    /// Handles an agent standing on its goal; returns whether it counts as an arrival.
    fn on_arrival(&mut self, i: usize) -> bool {
        match self.config.on_target {
            OnTarget::Nothing => {
                if self.goal_time[i].is_some() {
                    return false;
                }
                self.goal_time[i] = Some(self.step);
            }
            OnTarget::Disappear => {
                self.goal_time[i].get_or_insert(self.step);
                self.active[i] = false;
                let c = self.grid.index(self.positions[i]);
                self.occupancy[c] = NO_AGENT;
            }
            OnTarget::Restart => {
                self.goal_time[i].get_or_insert(self.step);
                self.goals[i] = self.draw_goal(self.positions[i]);
            }
        }
        self.goals_achieved += 1;
        true
    }

    /// Uniform free cell of `from`'s component other than `from` itself.
    fn draw_goal(&mut self, from: Pos) -> Pos {
        let here = self.grid.index(from);
        let comp = self.components.of(here).expect("agent on a free cell");
        let members = self.components.members(comp);
        if members.len() < 2 {
            return from;
        }
        loop {
            let c = members[self.goal_rng.gen_range(0..members.len())] as usize;
            if c != here {
                return self.grid.pos(c);
            }
        }
    }

    /// SoC, makespan, CSR, throughput and collisions of a finished episode.
    pub fn episode_indicators(&self) -> Result<EpisodeIndicators, EnvError> {
        if !self.is_done() {
            return Err(EnvError::EpisodeRunning);
        }
        let limit = self.config.max_episode_steps;
        let times: Vec<u32> = self.goal_time.iter().map(|t| t.unwrap_or(limit)).collect();
        Ok(EpisodeIndicators {
            soc: times.iter().map(|&t| t as u64).sum(),
            makespan: times.iter().copied().max().unwrap_or(0),
            csr: self.goal_time.iter().all(Option::is_some),
            goals_achieved: self.goals_achieved,
            throughput: self.goals_achieved as f64 / limit as f64,
            collisions: self.collisions,
            per_agent_goal_times: self.goal_time.clone(),
            episode_length: self.step,
        })
    }
}

/// Free function form of [`Env::episode_indicators`].
pub fn episode_indicators(env: &Env) -> Result<EpisodeIndicators, EnvError> {
    env.episode_indicators()
}

fn check_placement(
    grid: &MapGrid,
    components: &Components,
    n: usize,
    starts: &[Pos],
    goals: &[Pos],
) -> Result<(), EnvError> {
    if starts.len() != n {
        return Err(EnvError::CountMismatch { what: "starts", expected: n, got: starts.len() });
    }
    if goals.len() != n {
        return Err(EnvError::CountMismatch { what: "goals", expected: n, got: goals.len() });
    }
    let mut start_owner = vec![NO_AGENT; grid.num_cells()];
    let mut goal_owner = vec![NO_AGENT; grid.num_cells()];
    for i in 0..n {
        let (s, g) = (starts[i], goals[i]);
        if !grid.is_free(s) {
            return Err(EnvError::NotFree { what: "start", agent: i, pos: s });
        }
        if !grid.is_free(g) {
            return Err(EnvError::NotFree { what: "goal", agent: i, pos: g });
        }
        let (si, gi) = (grid.index(s), grid.index(g));
        if start_owner[si] != NO_AGENT {
            return Err(EnvError::DuplicateStart { first: start_owner[si] as usize, second: i, pos: s });
        }
        if goal_owner[gi] != NO_AGENT {
            return Err(EnvError::DuplicateGoal { first: goal_owner[gi] as usize, second: i, pos: g });
        }
        start_owner[si] = i as u32;
        goal_owner[gi] = i as u32;
        if !components.same(si, gi) {
            return Err(EnvError::UnreachableGoal { agent: i, start: s, goal: g });
        }
    }
    Ok(())
}
