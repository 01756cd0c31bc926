use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::search::AStar;
use super::Policy;
use crate::env::{Action, Env};
use crate::grid::{MapGrid, Pos};
use crate::rng::{self, Stream};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomParams {
    pub seed: u64,
}

/// Uniform over the five actions for every agent, every step.
pub struct RandomPolicy {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: rng::stream(seed, Stream::Policy) }
    }

    /// Writes one action per agent into `out`.
    pub fn fill(&mut self, out: &mut [Action]) {
        for a in out {
            *a = Action::ALL[self.rng.gen_range(0..Action::ALL.len())];
        }
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn reset_states(&mut self) {
        self.rng = rng::stream(self.seed, Stream::Policy);
    }

    fn act(&mut self, env: &Env) -> Vec<Action> {
        let mut out = vec![Action::Wait; env.num_agents()];
        self.fill(&mut out);
        out
    }
}

/// Every agent follows its own shortest path and ignores the others.
/// Paths are recomputed when an agent is knocked off its path or its goal
/// changes.
#[derive(Default)]
pub struct ShortestPathPolicy {
    map: Option<Arc<MapGrid>>,
    search: Option<AStar>,
    paths: Vec<Route>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Route {
    pub goal: Option<Pos>,
    pub cells: Vec<Pos>,
    pub at: usize,
}

impl Route {
    /// The next move if `pos` is where the route expects the agent.
    pub fn next_move(&mut self, pos: Pos, goal: Pos) -> Option<Action> {
        if self.goal != Some(goal) {
            return None;
        }
        if self.cells.get(self.at) != Some(&pos) {
            // tolerate one step of lag, e.g. after a shielded move
            if self.at > 0 && self.cells.get(self.at - 1) == Some(&pos) {
                self.at -= 1;
            } else {
                return None;
            }
        }
        match self.cells.get(self.at + 1) {
            Some(&next) => {
                self.at += 1;
                Action::between(pos, next)
            }
            None => Some(Action::Wait),
        }
    }

    pub fn start(&mut self, goal: Pos, cells: Vec<Pos>) -> Action {
        self.goal = Some(goal);
        self.cells = cells;
        self.at = 0;
        let here = self.cells[0];
        self.next_move(here, goal).unwrap_or(Action::Wait)
    }
}

impl ShortestPathPolicy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for ShortestPathPolicy {
    fn name(&self) -> &str {
        "astar"
    }

    fn reset_states(&mut self) {
        self.paths.clear();
    }

    fn act(&mut self, env: &Env) -> Vec<Action> {
        if !self.map.as_ref().is_some_and(|m| Arc::ptr_eq(m, env.grid_arc())) {
            self.map = Some(env.grid_arc().clone());
            self.search = Some(AStar::new(env.grid()));
            self.paths.clear();
        }
        let n = env.num_agents();
        self.paths.resize_with(n, Route::default);
        let map = env.grid();
        let search = self.search.as_mut().expect("initialised above");
        (0..n)
            .map(|i| {
                if !env.is_active(i) {
                    return Action::Wait;
                }
                let (pos, goal) = (env.positions()[i], env.goals()[i]);
                if let Some(a) = self.paths[i].next_move(pos, goal) {
                    return a;
                }
                match search.search(map, pos, goal, |_| false) {
                    Some(cells) => self.paths[i].start(goal, cells),
                    None => Action::Wait,
                }
            })
            .collect()
    }
}
