use std::sync::Arc;

use super::basic::Route;
use super::search::AStar;
use super::Policy;
use crate::env::{Action, Env};
use crate::grid::{MapGrid, Pos};

/// Decentralised replanning: each agent runs A* treating the other agents it
/// can currently see (within the observation radius) as obstacles and takes
/// the first move. Without such a path it plans ignoring agents, and waits
/// if the goal is unreachable altogether.
///
/// A path planned while no other agent was in view is kept for later steps
/// until an agent shows up on it, since replanning would return a path of
/// the same length.
#[derive(Default)]
pub struct GreedyReplanPolicy {
    map: Option<Arc<MapGrid>>,
    search: Option<AStar>,
    routes: Vec<Route>,
}

impl GreedyReplanPolicy {
    pub fn new() -> Self {
        Self::default()
    }
}

fn in_view(me: Pos, p: Pos, radius: i32) -> bool {
    (p.row - me.row).abs() <= radius && (p.col - me.col).abs() <= radius
}

fn sees_other(env: &Env, me: usize, radius: i32) -> bool {
    let p = env.positions()[me];
    let map = env.grid();
    for dr in -radius..=radius {
        for dc in -radius..=radius {
            let q = p.offset(dr, dc);
            if map.in_bounds(q) && env.agent_at(q).is_some_and(|j| j != me) {
                return true;
            }
        }
    }
    false
}

impl Policy for GreedyReplanPolicy {
    fn name(&self) -> &str {
        "greedy"
    }

    fn reset_states(&mut self) {
        self.routes.clear();
    }

    fn act(&mut self, env: &Env) -> Vec<Action> {
        if !self.map.as_ref().is_some_and(|m| Arc::ptr_eq(m, env.grid_arc())) {
            self.map = Some(env.grid_arc().clone());
            self.search = Some(AStar::new(env.grid()));
            self.routes.clear();
        }
        let n = env.num_agents();
        self.routes.resize_with(n, Route::default);
        let map = env.grid();
        let radius = env.config().obs_radius as i32;
        let search = self.search.as_mut().expect("initialised above");
        (0..n)
            .map(|i| {
                if !env.is_active(i) {
                    return Action::Wait;
                }
                let (pos, goal) = (env.positions()[i], env.goals()[i]);
                let crowded = sees_other(env, i, radius);
                if !crowded {
                    if let Some(a) = self.routes[i].next_move(pos, goal) {
                        return a;
                    }
                }
                let blocked = |c: usize| {
                    let q = map.pos(c);
                    in_view(pos, q, radius) && env.agent_at(q).is_some_and(|j| j != i)
                };
                let path = if crowded { search.search(map, pos, goal, blocked) } else { None };
                let path = path.or_else(|| search.search(map, pos, goal, |_| false));
                match path {
                    Some(cells) => {
                        let a = self.routes[i].start(goal, cells);
                        if crowded {
                            // not reusable once the view changes
                            self.routes[i].goal = None;
                        }
                        a
                    }
                    None => Action::Wait,
                }
            })
            .collect()
    }
}
