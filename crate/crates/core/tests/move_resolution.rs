mod common;

use gridmapf::env::{resolve_moves, CollisionSystem};
use gridmapf::grid::{MapGrid, Pos};

#[test]
fn matches_conflict_enumeration_exhaustively() {
    let cases = common::exhaustive_resolution_check().unwrap();
    assert!(cases > 1_000_000, "only {cases} cases");
}

#[test]
fn two_claimants_of_one_cell() {
    let map = MapGrid::empty(3, 3).unwrap();
    let pos = [Pos::new(1, 0), Pos::new(1, 2)];
    let desired = [Pos::new(1, 1), Pos::new(1, 1)];
    let (after, tally) = resolve_moves(&pos, &desired, &map, &[true, true], CollisionSystem::BlockAll);
    assert_eq!(after, pos);
    assert_eq!(tally.vertex, 2);
    let (after, tally) = resolve_moves(&pos, &desired, &map, &[true, true], CollisionSystem::Soft);
    assert_eq!(after, vec![Pos::new(1, 1), Pos::new(1, 2)]);
    assert_eq!(tally.vertex, 1);
}

#[test]
fn reverting_the_head_of_a_chain_reverts_the_followers() {
    // 0 blocked by the wall, 1 follows 0, 2 follows 1
    let mut raster = vec![false; 5];
    raster[0] = true;
    let map = MapGrid::new(5, 1, raster).unwrap();
    let pos = [Pos::new(0, 1), Pos::new(0, 2), Pos::new(0, 3)];
    let desired = [Pos::new(0, 0), Pos::new(0, 1), Pos::new(0, 2)];
    for mode in [CollisionSystem::BlockAll, CollisionSystem::Soft] {
        let (after, tally) = resolve_moves(&pos, &desired, &map, &[true; 3], mode);
        assert_eq!(after, pos);
        assert_eq!((tally.obstacle, tally.vertex, tally.edge), (1, 2, 0));
    }
}

#[test]
fn rotating_cycle_moves() {
    let map = MapGrid::empty(2, 2).unwrap();
    let pos = [Pos::new(0, 0), Pos::new(0, 1), Pos::new(1, 1), Pos::new(1, 0)];
    let desired = [Pos::new(0, 1), Pos::new(1, 1), Pos::new(1, 0), Pos::new(0, 0)];
    let (after, tally) = resolve_moves(&pos, &desired, &map, &[true; 4], CollisionSystem::BlockAll);
    assert_eq!(after, desired.to_vec());
    assert_eq!(tally.total(), 0);
}
