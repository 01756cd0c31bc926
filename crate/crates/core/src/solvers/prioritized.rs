//! Windowed prioritized planning with space-time A*.
//!
//! Every `window` steps (or as soon as reality diverges from the plan) all
//! active agents are planned one after another against a shared
//! [`ReservationTable`] covering the next `horizon` steps. Plans minimise
//! `moves + waits away from the goal + distance-to-goal at the horizon`.
//!
//! Agents away from their goal plan first, in index order rotated by one
//! position per replan; agents already on their goal plan last, so they
//! step aside instead of walling off corridors.
//!
//! An agent that finds no plan is pinned: it waits in place for the whole
//! window, its cell is reserved before anyone else plans, and the round
//! restarts. Every restart pins a new agent, so a round ends after at most
//! `n` restarts with a conflict-free joint plan.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::reservation::ReservationTable;
use super::search::{bfs_distances, DistanceField};
use super::Policy;
use crate::env::{Action, Env};
use crate::grid::{MapGrid, Pos};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrioritizedParams {
    pub window: usize,
    pub horizon: usize,
    /// Replan as soon as a lifelong agent receives a new goal.
    pub replan_on_new_goal: bool,
}

impl Default for PrioritizedParams {
    fn default() -> Self {
        Self { window: 5, horizon: 20, replan_on_new_goal: true }
    }
}

impl PrioritizedParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.window == 0 || self.horizon < self.window {
            return Err(format!("need horizon >= window >= 1, got window {} horizon {}", self.window, self.horizon));
        }
        Ok(())
    }
}

// Upper bound on cached distance-field cells before the cache is dropped.
const DISTANCE_CACHE_CELLS: usize = 1 << 25;

pub struct PrioritizedPlanner {
    params: PrioritizedParams,
    state: Option<PlannerState>,
}

struct PlannerState {
    map: Arc<MapGrid>,
    table: ReservationTable,
    search: SpaceTimeAStar,
    distances: HashMap<usize, DistanceField>,
    plans: Vec<Vec<usize>>,
    planned_goals: Vec<Pos>,
    plan_step: u32,
    rounds: usize,
    pinned: Vec<bool>,
}

impl PrioritizedPlanner {
    pub fn new(params: PrioritizedParams) -> Self {
        Self { params, state: None }
    }

    pub fn params(&self) -> PrioritizedParams {
        self.params
    }

    /// The committed joint plan (cell per step from the last replan).
    pub fn plans(&self) -> Option<(u32, Vec<Vec<Pos>>)> {
        let st = self.state.as_ref()?;
        let plans = st.plans.iter().map(|p| p.iter().map(|&c| st.map.pos(c)).collect()).collect();
        Some((st.plan_step, plans))
    }
}

impl PlannerState {
    fn new(map: Arc<MapGrid>, params: PrioritizedParams) -> Self {
        Self {
            table: ReservationTable::new(map.num_cells(), params.horizon),
            search: SpaceTimeAStar::new(map.num_cells(), params.horizon),
            distances: HashMap::new(),
            plans: Vec::new(),
            planned_goals: Vec::new(),
            plan_step: 0,
            rounds: 0,
            pinned: Vec::new(),
            map,
        }
    }

    fn needs_replan(&self, env: &Env, params: &PrioritizedParams) -> bool {
        let n = env.num_agents();
        if self.plans.len() != n {
            return true;
        }
        let k = (env.step_count() - self.plan_step) as usize;
        if k >= params.window {
            return true;
        }
        (0..n).filter(|&i| env.is_active(i)).any(|i| {
            self.plans[i].get(k).copied() != Some(self.map.index(env.positions()[i]))
                || (params.replan_on_new_goal && self.planned_goals[i] != env.goals()[i])
        })
    }

    fn replan(&mut self, env: &Env) {
        let n = env.num_agents();
        let starts: Vec<usize> = env.positions().iter().map(|&p| self.map.index(p)).collect();
        self.pinned = vec![false; n];
        self.plans = vec![Vec::new(); n];
        let shift = self.rounds % n.max(1);
        self.rounds += 1;
        let mut priority: Vec<usize> = (0..n).map(|k| (k + shift) % n).collect();
        priority.sort_by_key(|&i| env.positions()[i] == env.goals()[i]);
        loop {
            self.table.clear();
            for i in (0..n).filter(|&i| env.is_active(i) && self.pinned[i]) {
                self.plans[i] = vec![starts[i]];
                self.table.reserve_path(i, &self.plans[i]);
            }
            let mut failed = false;
            let order: Vec<usize> = priority.iter().copied().filter(|&i| env.is_active(i) && !self.pinned[i]).collect();
            for i in order {
                let goal = env.goals()[i];
                let gi = self.map.index(goal);
                let field = cached_distance(&mut self.distances, &self.map, goal);
                match self.search.plan(&self.map, &self.table, field, starts[i], gi) {
                    Some(path) => {
                        self.table.reserve_path(i, &path);
                        self.plans[i] = path;
                    }
                    None => {
                        self.pinned[i] = true;
                        failed = true;
                    }
                }
            }
            if !failed {
                break;
            }
        }
        for i in (0..n).filter(|&i| !env.is_active(i)) {
            self.plans[i] = vec![starts[i]];
        }
        self.planned_goals = env.goals().to_vec();
        self.plan_step = env.step_count();
    }
}

fn cached_distance<'a>(cache: &'a mut HashMap<usize, DistanceField>, map: &MapGrid, goal: Pos) -> &'a DistanceField {
    let g = map.index(goal);
    if !cache.contains_key(&g) {
        if (cache.len() + 1) * map.num_cells() > DISTANCE_CACHE_CELLS {
            cache.clear();
        }
        cache.insert(g, bfs_distances(map, goal).expect("goals are free cells"));
    }
    &cache[&g]
}

impl Policy for PrioritizedPlanner {
    fn name(&self) -> &str {
        "prioritized"
    }

    fn reset_states(&mut self) {
        self.state = None;
    }

    fn act(&mut self, env: &Env) -> Vec<Action> {
        let params = self.params;
        let st = match &mut self.state {
            Some(st) if Arc::ptr_eq(&st.map, env.grid_arc()) => st,
            slot => slot.insert(PlannerState::new(env.grid_arc().clone(), params)),
        };
        if st.needs_replan(env, &params) {
            st.replan(env);
        }
        let k = (env.step_count() - st.plan_step) as usize;
        (0..env.num_agents())
            .map(|i| {
                let plan = &st.plans[i];
                let here = plan[k.min(plan.len() - 1)];
                let next = plan[(k + 1).min(plan.len() - 1)];
                Action::between(st.map.pos(here), st.map.pos(next)).unwrap_or(Action::Wait)
            })
            .collect()
    }
}

/// A* over `(cell, t)` for `t = 0..=horizon` with reusable buffers.
struct SpaceTimeAStar {
    cells: usize,
    horizon: usize,
    g: Vec<u32>,
    parent: Vec<u32>,
    seen: Vec<u32>,
    closed: Vec<u32>,
    stamp: u32,
    open: BinaryHeap<Reverse<(u32, u32, usize, usize)>>,
}

impl SpaceTimeAStar {
    fn new(cells: usize, horizon: usize) -> Self {
        let n = cells * (horizon + 1);
        Self {
            cells,
            horizon,
            g: vec![0; n],
            parent: vec![0; n],
            seen: vec![0; n],
            closed: vec![0; n],
            stamp: 0,
            open: BinaryHeap::new(),
        }
    }

    /// Cell sequence for `t = 0..=horizon`, or `None` if every route hits a
    /// reservation.
    fn plan(
        &mut self,
        map: &MapGrid,
        table: &ReservationTable,
        field: &DistanceField,
        start: usize,
        goal: usize,
    ) -> Option<Vec<usize>> {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.fill(0);
            self.closed.fill(0);
            self.stamp = 1;
        }
        // unreachable goal: plan to stay out of the way, heuristic zero
        let reachable = field.at(start) != DistanceField::INF;
        let h = |c: usize| if reachable { field.at(c) } else { 0 };
        if !table.vertex_free(start, 0) {
            return None;
        }
        self.open.clear();
        self.g[start] = 0;
        self.seen[start] = self.stamp;
        // order: f, h, later time first, cell
        self.open.push(Reverse((h(start), h(start), self.horizon, start)));
        while let Some(Reverse((f, hc, rt, cell))) = self.open.pop() {
            let t = self.horizon - rt;
            let s = t * self.cells + cell;
            if self.closed[s] == self.stamp || f != self.g[s] + hc {
                continue;
            }
            self.closed[s] = self.stamp;
            if t == self.horizon {
                return Some(self.unwind(s));
            }
            let p = map.pos(cell);
            let next_t = t + 1;
            let moves = std::iter::once(p).chain(map.free_neighbors(p));
            for q in moves {
                let qc = map.index(q);
                let hq = h(qc);
                if hq == DistanceField::INF || !table.vertex_free(qc, next_t) {
                    continue;
                }
                if qc != cell && !table.edge_free(cell, qc, next_t) {
                    continue;
                }
                let cost = if qc == cell && cell == goal { 0 } else { 1 };
                let ns = next_t * self.cells + qc;
                let ng = self.g[s] + cost;
                if self.closed[ns] == self.stamp {
                    continue;
                }
                if self.seen[ns] != self.stamp || ng < self.g[ns] {
                    self.seen[ns] = self.stamp;
                    self.g[ns] = ng;
                    self.parent[ns] = s as u32;
                    self.open.push(Reverse((ng + hq, hq, self.horizon - next_t, qc)));
                }
            }
        }
        None
    }

    fn unwind(&self, mut s: usize) -> Vec<usize> {
        let mut path = Vec::with_capacity(self.horizon + 1);
        loop {
            path.push(s % self.cells);
            if s < self.cells {
                break;
            }
            s = self.parent[s] as usize;
        }
        path.reverse();
        path
    }
}
