//! Simultaneous move resolution with collision shielding.
//!
//! Resolution runs in rounds until nothing changes:
//!
//! 1. a move into an obstacle or off the map becomes a wait (one obstacle
//!    collision for that agent);
//! 2. vertex conflicts: agents claiming the same cell are grouped. Under
//!    [`CollisionSystem::BlockAll`] every mover in a group of two or more is
//!    reverted. Under [`CollisionSystem::Soft`] a group that contains a
//!    stationary agent reverts all its movers, otherwise the lowest-index
//!    mover keeps its move and the rest revert;
//! 3. edge conflicts: two movers exchanging cells are both reverted;
//! 4. repeat 2-3, since a reverted agent now claims its own cell.
//!
//! Every reverted agent accounts for exactly one collision event, so an
//! agent contributes at most one event per step.
//!
//! After the first round every cell has at most one moving claimant and no
//! swaps remain, so later rounds can only revert the mover following a
//! freshly reverted agent into its cell. [`MoveResolver`] exploits that to
//! replace the later rounds by a worklist over follower links.

use super::{CollisionSystem, CollisionTally};
use crate::grid::{MapGrid, Pos};

const NONE: u32 = u32::MAX;

/// Reusable scratch space for [`resolve_moves`]; sized to one map.
#[derive(Clone, Debug)]
pub struct MoveResolver {
    occupant: Vec<u32>,
    claims: Vec<u32>,
    first_mover: Vec<u32>,
    has_stayer: Vec<bool>,
    touched: Vec<usize>,
    follower: Vec<u32>,
    worklist: Vec<u32>,
    reverted: Vec<u32>,
}

impl MoveResolver {
    pub fn new(map: &MapGrid) -> Self {
        let n = map.num_cells();
        Self {
            occupant: vec![NONE; n],
            claims: vec![0; n],
            first_mover: vec![NONE; n],
            has_stayer: vec![false; n],
            touched: Vec::new(),
            follower: Vec::new(),
            worklist: Vec::new(),
            reverted: Vec::new(),
        }
    }

    /// Resolves `targets` in place: on return `targets[i]` is agent `i`'s new
    /// cell. Inactive agents are left untouched and ignored.
    pub fn resolve(
        &mut self,
        map: &MapGrid,
        positions: &[Pos],
        targets: &mut [Pos],
        active: &[bool],
        mode: CollisionSystem,
    ) -> CollisionTally {
        let n = positions.len();
        assert_eq!(targets.len(), n);
        assert_eq!(active.len(), n);
        debug_assert_eq!(self.occupant.len(), map.num_cells());
        let mut tally = CollisionTally::default();

        for i in 0..n {
            if !active[i] {
                continue;
            }
            if targets[i] != positions[i] && !map.is_free(targets[i]) {
                targets[i] = positions[i];
                tally.obstacle += 1;
            }
        }

        // Occupancy and first-round claims.
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let here = map.index(positions[i]);
            self.occupant[here] = i as u32;
            self.touched.push(here);
            let c = map.index(targets[i]);
            self.touched.push(c);
            self.claims[c] += 1;
            if targets[i] == positions[i] {
                self.has_stayer[c] = true;
            } else if self.first_mover[c] == NONE {
                self.first_mover[c] = i as u32;
            }
        }

        // Round one, vertex phase: decided on the round-start claims, applied together.
        for i in 0..n {
            if !active[i] || targets[i] == positions[i] {
                continue;
            }
            let c = map.index(targets[i]);
            if self.claims[c] < 2 {
                continue;
            }
            let loses = match mode {
                CollisionSystem::BlockAll => true,
                CollisionSystem::Soft => self.has_stayer[c] || self.first_mover[c] != i as u32,
            };
            if loses {
                self.reverted.push(i as u32);
            }
        }
        for &i in &self.reverted {
            let i = i as usize;
            targets[i] = positions[i];
            tally.vertex += 1;
            self.worklist.push(i as u32);
        }

        // Round one, edge phase.
        for i in 0..n {
            if !active[i] || targets[i] == positions[i] {
                continue;
            }
            let j = self.occupant[map.index(targets[i])];
            if j == NONE || (j as usize) <= i {
                continue;
            }
            let j = j as usize;
            if targets[j] == positions[i] && targets[j] != positions[j] {
                targets[i] = positions[i];
                targets[j] = positions[j];
                tally.edge += 2;
                self.worklist.push(i as u32);
                self.worklist.push(j as u32);
            }
        }

        // Later rounds: a reverted agent blocks whoever was following it.
        if !self.worklist.is_empty() {
            self.follower.clear();
            self.follower.resize(n, NONE);
            for i in 0..n {
                if !active[i] || targets[i] == positions[i] {
                    continue;
                }
                let j = self.occupant[map.index(targets[i])];
                if j != NONE {
                    self.follower[j as usize] = i as u32;
                }
            }
            while let Some(j) = self.worklist.pop() {
                let f = self.follower[j as usize];
                if f == NONE {
                    continue;
                }
                let f = f as usize;
                if targets[f] != positions[f] && targets[f] == positions[j as usize] {
                    targets[f] = positions[f];
                    tally.vertex += 1;
                    self.worklist.push(f as u32);
                }
            }
        }

        for &c in &self.touched {
            self.occupant[c] = NONE;
            self.claims[c] = 0;
            self.first_mover[c] = NONE;
            self.has_stayer[c] = false;
        }
        self.touched.clear();
        self.reverted.clear();
        tally
    }
}

/// Resolves one simultaneous step. Returns the new positions and the
/// collision events it produced.
///
/// `desired[i]` must be `positions[i]` or one of its 4-neighbours (possibly
/// off the map). Inactive agents keep their position and take no part.
pub fn resolve_moves(
    positions: &[Pos],
    desired: &[Pos],
    map: &MapGrid,
    active: &[bool],
    mode: CollisionSystem,
) -> (Vec<Pos>, CollisionTally) {
    let mut targets: Vec<Pos> =
        desired.iter().zip(positions).zip(active).map(|((&d, &p), &a)| if a { d } else { p }).collect();
    let tally = MoveResolver::new(map).resolve(map, positions, &mut targets, active, mode);
    (targets, tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(w: usize, h: usize) -> MapGrid {
        MapGrid::empty(w, h).unwrap()
    }

    fn p(r: i32, c: i32) -> Pos {
        Pos::new(r, c)
    }

    #[test]
    fn free_move_goes_through() {
        let m = open(3, 3);
        let (next, t) = resolve_moves(&[p(0, 0)], &[p(0, 1)], &m, &[true], CollisionSystem::BlockAll);
        assert_eq!(next, vec![p(0, 1)]);
        assert_eq!(t, CollisionTally::default());
    }

    #[test]
    fn obstacle_and_edge_of_map_block() {
        let m = MapGrid::new(2, 1, vec![false, true]).unwrap();
        let (next, t) = resolve_moves(&[p(0, 0)], &[p(0, 1)], &m, &[true], CollisionSystem::Soft);
        assert_eq!(next, vec![p(0, 0)]);
        assert_eq!(t.obstacle, 1);
        let (next, t) = resolve_moves(&[p(0, 0)], &[p(-1, 0)], &m, &[true], CollisionSystem::Soft);
        assert_eq!(next, vec![p(0, 0)]);
        assert_eq!(t.obstacle, 1);
    }

    #[test]
    fn same_cell_block_all_vs_soft() {
        let m = open(3, 3);
        let pos = [p(1, 0), p(1, 2)];
        let want = [p(1, 1), p(1, 1)];
        let (next, t) = resolve_moves(&pos, &want, &m, &[true, true], CollisionSystem::BlockAll);
        assert_eq!(next, pos.to_vec());
        assert_eq!(t, CollisionTally { obstacle: 0, vertex: 2, edge: 0 });
        let (next, t) = resolve_moves(&pos, &want, &m, &[true, true], CollisionSystem::Soft);
        assert_eq!(next, vec![p(1, 1), p(1, 2)]);
        assert_eq!(t, CollisionTally { obstacle: 0, vertex: 1, edge: 0 });
    }

    #[test]
    fn swap_reverts_both_in_both_modes() {
        let m = open(3, 3);
        for mode in [CollisionSystem::BlockAll, CollisionSystem::Soft] {
            let (next, t) = resolve_moves(&[p(0, 0), p(0, 1)], &[p(0, 1), p(0, 0)], &m, &[true, true], mode);
            assert_eq!(next, vec![p(0, 0), p(0, 1)]);
            assert_eq!(t, CollisionTally { obstacle: 0, vertex: 0, edge: 2 });
        }
    }

    #[test]
    fn blocked_leader_stops_follower() {
        let m = MapGrid::new(3, 1, vec![true, false, false]).unwrap();
        // agent 0 at (0,1) walks into the wall, agent 1 at (0,2) follows it
        let (next, t) =
            resolve_moves(&[p(0, 1), p(0, 2)], &[p(0, 0), p(0, 1)], &m, &[true, true], CollisionSystem::Soft);
        assert_eq!(next, vec![p(0, 1), p(0, 2)]);
        assert_eq!(t, CollisionTally { obstacle: 1, vertex: 1, edge: 0 });
    }

    #[test]
    fn train_of_agents_moves_together() {
        let m = open(4, 1);
        let pos = [p(0, 2), p(0, 1), p(0, 0)];
        let want = [p(0, 3), p(0, 2), p(0, 1)];
        let (next, t) = resolve_moves(&pos, &want, &m, &[true; 3], CollisionSystem::BlockAll);
        assert_eq!(next, want.to_vec());
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn soft_winner_yielding_to_reverted_occupant() {
        let m = open(3, 3);
        // Agent 0 wins (1,1) over agent 1, but the occupant of (1,1), agent 2,
        // is reverted because agent 3 stays on (1,2); agent 0 then yields too.
        let pos = [p(0, 1), p(1, 0), p(1, 1), p(1, 2)];
        let want = [p(1, 1), p(1, 1), p(1, 2), p(1, 2)];
        let (next, t) = resolve_moves(&pos, &want, &m, &[true; 4], CollisionSystem::Soft);
        assert_eq!(next, pos.to_vec());
        assert_eq!(t, CollisionTally { obstacle: 0, vertex: 3, edge: 0 });
    }

    #[test]
    fn inactive_agents_are_invisible() {
        let m = open(3, 1);
        let (next, t) =
            resolve_moves(&[p(0, 0), p(0, 1)], &[p(0, 1), p(0, 1)], &m, &[true, false], CollisionSystem::BlockAll);
        assert_eq!(next, vec![p(0, 1), p(0, 1)]);
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn rotation_cycle_is_allowed() {
        let m = open(2, 2);
        let pos = [p(0, 0), p(0, 1), p(1, 1), p(1, 0)];
        let want = [p(0, 1), p(1, 1), p(1, 0), p(0, 0)];
        let (next, t) = resolve_moves(&pos, &want, &m, &[true; 4], CollisionSystem::BlockAll);
        assert_eq!(next, want.to_vec());
        assert_eq!(t.total(), 0);
    }
}
