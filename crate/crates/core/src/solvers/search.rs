//! Single-agent grid search: BFS distance fields and A*.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::grid::{MapGrid, Pos};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("goal {0} is not a free cell")]
    GoalNotFree(Pos),
}

/// Exact 4-connected distances to one goal; `None` for unreachable cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceField {
    width: usize,
    goal: Pos,
    dist: Vec<u32>,
}

impl DistanceField {
    pub const INF: u32 = u32::MAX;

    pub fn goal(&self) -> Pos {
        self.goal
    }

    /// Distance from `p` to the goal, `None` if blocked, off-map or unreachable.
    #[inline]
    pub fn get(&self, p: Pos) -> Option<u32> {
        if p.row < 0 || p.col < 0 || p.col as usize >= self.width {
            return None;
        }
        let d = *self.dist.get(p.row as usize * self.width + p.col as usize)?;
        (d != Self::INF).then_some(d)
    }

    /// Raw distance by cell index, [`DistanceField::INF`] when unreachable.
    #[inline]
    pub fn at(&self, index: usize) -> u32 {
        self.dist[index]
    }
}

pub fn bfs_distances(map: &MapGrid, goal: Pos) -> Result<DistanceField, SearchError> {
    if !map.is_free(goal) {
        return Err(SearchError::GoalNotFree(goal));
    }
    let mut dist = vec![DistanceField::INF; map.num_cells()];
    let mut queue = VecDeque::new();
    let g = map.index(goal);
    dist[g] = 0;
    queue.push_back(g);
    while let Some(cur) = queue.pop_front() {
        let d = dist[cur] + 1;
        for q in map.free_neighbors(map.pos(cur)) {
            let qi = map.index(q);
            if dist[qi] == DistanceField::INF {
                dist[qi] = d;
                queue.push_back(qi);
            }
        }
    }
    Ok(DistanceField { width: map.width(), goal, dist })
}

/// Shortest path from `start` to `goal` inclusive of both ends.
pub fn a_star(map: &MapGrid, start: Pos, goal: Pos) -> Option<Vec<Pos>> {
    AStar::new(map).search(map, start, goal, |_| false)
}

/// A* with scratch buffers reused across searches on one map.
///
/// The open list is ordered by `(f, h, row, col)`, which makes the returned
/// path independent of insertion order.
#[derive(Clone, Debug)]
pub struct AStar {
    g: Vec<u32>,
    parent: Vec<u32>,
    seen: Vec<u32>,
    closed: Vec<u32>,
    stamp: u32,
    open: BinaryHeap<Reverse<(u32, u32, i32, i32)>>,
}

impl AStar {
    pub fn new(map: &MapGrid) -> Self {
        let n = map.num_cells();
        Self {
            g: vec![0; n],
            parent: vec![0; n],
            seen: vec![0; n],
            closed: vec![0; n],
            stamp: 0,
            open: BinaryHeap::new(),
        }
    }

    fn next_stamp(&mut self) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.fill(0);
            self.closed.fill(0);
            self.stamp = 1;
        }
    }

    /// Path avoiding cells for which `blocked(index)` holds. The start cell
    /// is never tested; a blocked goal makes the search fail.
    pub fn search(
        &mut self,
        map: &MapGrid,
        start: Pos,
        goal: Pos,
        blocked: impl Fn(usize) -> bool,
    ) -> Option<Vec<Pos>> {
        if !map.is_free(start) || !map.is_free(goal) {
            return None;
        }
        if start == goal {
            return Some(vec![start]);
        }
        let gi = map.index(goal);
        if blocked(gi) {
            return None;
        }
        self.next_stamp();
        self.open.clear();
        let s = map.index(start);
        self.g[s] = 0;
        self.seen[s] = self.stamp;
        let h0 = start.manhattan(goal);
        self.open.push(Reverse((h0, h0, start.row, start.col)));
        while let Some(Reverse((f, h, row, col))) = self.open.pop() {
            let p = Pos::new(row, col);
            let cur = map.index(p);
            if self.closed[cur] == self.stamp || f != self.g[cur] + h {
                continue;
            }
            self.closed[cur] = self.stamp;
            if cur == gi {
                return Some(self.unwind(map, s, gi));
            }
            let ng = self.g[cur] + 1;
            for q in map.free_neighbors(p) {
                let qi = map.index(q);
                if self.closed[qi] == self.stamp || blocked(qi) {
                    continue;
                }
                if self.seen[qi] != self.stamp || ng < self.g[qi] {
                    self.seen[qi] = self.stamp;
                    self.g[qi] = ng;
                    self.parent[qi] = cur as u32;
                    let hq = q.manhattan(goal);
                    self.open.push(Reverse((ng + hq, hq, q.row, q.col)));
                }
            }
        }
        None
    }

    fn unwind(&self, map: &MapGrid, start: usize, goal: usize) -> Vec<Pos> {
        let mut path = vec![map.pos(goal)];
        let mut cur = goal;
        while cur != start {
            cur = self.parent[cur] as usize;
            path.push(map.pos(cur));
        }
        path.reverse();
        path
    }
}

/// Number of moves along a path.
pub fn path_cost(path: &[Pos]) -> u32 {
    path.len().saturating_sub(1) as u32
}
