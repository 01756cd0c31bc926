//! Oracles shared by the integration tests and the acceptance binary.
//! Everything here is written from the move rules alone and deliberately
//! naive; none of it calls into the crate's resolver or search code.

#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use gridmapf::env::{resolve_moves, Action, CollisionSystem, CollisionTally, MoveResolver};
use gridmapf::grid::{MapGrid, Pos};

/// Literal fixed-point resolution: obstacle pass, then alternating vertex
/// and edge passes over whole snapshots until a pass changes nothing.
pub fn oracle_resolve(
    map: &MapGrid,
    pos: &[Pos],
    desired: &[Pos],
    active: &[bool],
    mode: CollisionSystem,
) -> (Vec<Pos>, CollisionTally) {
    let n = pos.len();
    let mut tally = CollisionTally::default();
    let mut tgt: Vec<Pos> = (0..n).map(|i| if active[i] { desired[i] } else { pos[i] }).collect();
    for i in 0..n {
        if active[i] && !map.is_free(tgt[i]) {
            tgt[i] = pos[i];
            tally.obstacle += 1;
        }
    }
    loop {
        let mut changed = false;

        let snapshot = tgt.clone();
        let mut groups: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
        for i in (0..n).filter(|&i| active[i]) {
            groups.entry((snapshot[i].row, snapshot[i].col)).or_default().push(i);
        }
        for group in groups.values().filter(|g| g.len() >= 2) {
            let movers: Vec<usize> = group.iter().copied().filter(|&i| snapshot[i] != pos[i]).collect();
            let has_stayer = movers.len() < group.len();
            let losers: &[usize] = match mode {
                CollisionSystem::BlockAll => &movers,
                CollisionSystem::Soft if has_stayer => &movers,
                CollisionSystem::Soft => &movers[1..],
            };
            for &l in losers {
                tgt[l] = pos[l];
                tally.vertex += 1;
                changed = true;
            }
        }

        for i in 0..n {
            for j in i + 1..n {
                if active[i] && active[j] && tgt[i] != pos[i] && tgt[i] == pos[j] && tgt[j] == pos[i] {
                    tgt[i] = pos[i];
                    tgt[j] = pos[j];
                    tally.edge += 2;
                    changed = true;
                }
            }
        }
        if !changed {
            return (tgt, tally);
        }
    }
}

/// Invariants of one resolved step. Returns a description of the first violation.
pub fn check_step(map: &MapGrid, before: &[Pos], after: &[Pos], active: &[bool]) -> Result<(), String> {
    let live: Vec<usize> = (0..after.len()).filter(|&i| active[i]).collect();
    for &i in &live {
        if !map.is_free(after[i]) {
            return Err(format!("agent {i} on non-free cell {:?}", after[i]));
        }
        if before[i].manhattan(after[i]) > 1 {
            return Err(format!("agent {i} jumped {:?} -> {:?}", before[i], after[i]));
        }
    }
    for (a, &i) in live.iter().enumerate() {
        for &j in &live[a + 1..] {
            if after[i] == after[j] {
                return Err(format!("agents {i} and {j} share {:?}", after[i]));
            }
            if after[i] != before[i] && after[i] == before[j] && after[j] == before[i] {
                return Err(format!("agents {i} and {j} swapped"));
            }
        }
    }
    Ok(())
}

/// Plain BFS distance, `None` when unreachable or either end is blocked.
pub fn bfs_distance(map: &MapGrid, from: Pos, to: Pos) -> Option<u32> {
    if !map.is_free(from) || !map.is_free(to) {
        return None;
    }
    let w = map.width() as i32;
    let key = |p: Pos| (p.row * w + p.col) as usize;
    let mut dist = vec![u32::MAX; map.width() * map.height()];
    let mut queue = VecDeque::from([from]);
    dist[key(from)] = 0;
    while let Some(p) = queue.pop_front() {
        if p == to {
            return Some(dist[key(p)]);
        }
        for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            let q = Pos::new(p.row + dr, p.col + dc);
            if map.is_free(q) && dist[key(q)] == u32::MAX {
                dist[key(q)] = dist[key(p)] + 1;
                queue.push_back(q);
            }
        }
    }
    None
}

/// Number of free 4-connected components.
pub fn count_components(map: &MapGrid) -> usize {
    let mut seen = vec![false; map.width() * map.height()];
    let w = map.width() as i32;
    let mut count = 0;
    for r in 0..map.height() as i32 {
        for c in 0..w {
            let p = Pos::new(r, c);
            if !map.is_free(p) || seen[(r * w + c) as usize] {
                continue;
            }
            count += 1;
            let mut stack = vec![p];
            seen[(r * w + c) as usize] = true;
            while let Some(p) = stack.pop() {
                for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                    let q = Pos::new(p.row + dr, p.col + dc);
                    if map.is_free(q) && !seen[(q.row * w + q.col) as usize] {
                        seen[(q.row * w + q.col) as usize] = true;
                        stack.push(q);
                    }
                }
            }
        }
    }
    count
}

/// Unordered pairs of 4-adjacent free cells.
pub fn free_edges(map: &MapGrid) -> usize {
    let mut edges = 0;
    for r in 0..map.height() as i32 {
        for c in 0..map.width() as i32 {
            let p = Pos::new(r, c);
            if map.is_free(p) {
                edges += map.is_free(Pos::new(r + 1, c)) as usize + map.is_free(Pos::new(r, c + 1)) as usize;
            }
        }
    }
    edges
}

/// 4x4 test boards: open, a pillar, and a wall with a gap.
pub fn small_boards() -> Vec<MapGrid> {
    let open = MapGrid::empty(4, 4).unwrap();
    let mut pillar = vec![false; 16];
    pillar[5] = true;
    let mut wall = vec![false; 16];
    for c in 0..3 {
        wall[2 * 4 + c] = true;
    }
    vec![open, MapGrid::new(4, 4, pillar).unwrap(), MapGrid::new(4, 4, wall).unwrap()]
}

/// Every placement of up to three agents on every board, every joint
/// action, both collision modes, compared against [`oracle_resolve`].
/// Also runs one masked pass with agent 1 inactive. Returns the number of
/// cases checked, or the first mismatch.
pub fn exhaustive_resolution_check() -> Result<u64, String> {
    let mut cases = 0u64;
    for map in small_boards() {
        let free: Vec<Pos> = map.free_cells().collect();
        let mut resolver = MoveResolver::new(&map);
        for n in 1..=3usize {
            for placement in placements(&free, n) {
                for masked in [false, true] {
                    if masked && n < 2 {
                        continue;
                    }
                    let active: Vec<bool> = (0..n).map(|i| !(masked && i == 1)).collect();
                    for code in 0..5usize.pow(n as u32) {
                        let actions: Vec<Action> =
                            (0..n).map(|i| Action::ALL[(code / 5usize.pow(i as u32)) % 5]).collect();
                        let desired: Vec<Pos> = placement.iter().zip(&actions).map(|(&p, a)| a.apply(p)).collect();
                        for mode in [CollisionSystem::BlockAll, CollisionSystem::Soft] {
                            let expected = oracle_resolve(&map, &placement, &desired, &active, mode);
                            let got = resolve_moves(&placement, &desired, &map, &active, mode);
                            let mut reused: Vec<Pos> =
                                (0..n).map(|i| if active[i] { desired[i] } else { placement[i] }).collect();
                            let reused_tally = resolver.resolve(&map, &placement, &mut reused, &active, mode);
                            if got != expected || (reused.clone(), reused_tally) != expected {
                                return Err(format!(
                                    "{mode:?} start {placement:?} actions {actions:?} active {active:?}: \
                                     expected {expected:?}, got {got:?} / reused {reused:?} {reused_tally:?}"
                                ));
                            }
                            check_step(&map, &placement, &got.0, &active)?;
                            cases += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(cases)
}

fn placements(free: &[Pos], n: usize) -> Vec<Vec<Pos>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(free: &[Pos], n: usize, cur: &mut Vec<Pos>, out: &mut Vec<Vec<Pos>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for &p in free {
            if !cur.contains(&p) {
                cur.push(p);
                rec(free, n, cur, out);
                cur.pop();
            }
        }
    }
    rec(free, n, &mut cur, &mut out);
    out
}

/// A 256x256 MovingAI map standing in for an ingested city: random
/// obstacles with a few `T` and `S` cells mixed in.
pub fn synthetic_city(seed: u64) -> String {
    let map = gridmapf::mapgen::gen_random(256, 256, 0.2, seed).unwrap();
    let mut out = String::from("type octile\nheight 256\nwidth 256\nmap\n");
    for r in 0..256i32 {
        for c in 0..256i32 {
            let blocked = !map.is_free(Pos::new(r, c));
            out.push(match (blocked, (r + c) % 3) {
                (false, _) => '.',
                (true, 0) => 'T',
                (true, 1) => 'S',
                (true, _) => '@',
            });
        }
        out.push('\n');
    }
    out
}

/// Registry with every generated benchmark map plus eight synthetic cities.
pub fn full_registry() -> (gridmapf::maps_io::MapRegistry, Vec<String>) {
    use gridmapf::maps_io::{ingest_movingai, suite, MapRegistry};
    let registry = MapRegistry::new();
    suite::register_generated(&registry).unwrap();
    let mut cities = Vec::new();
    for k in 0..suite::CITY_COUNT {
        let name = format!("city-{k}");
        suite::register_city(&registry, &name, ingest_movingai(&synthetic_city(100 + k as u64)).unwrap()).unwrap();
        cities.push(name);
    }
    (registry, cities)
}

/// Hand-built result set: algorithms `A`, `B`, `C` on four 64-agent
/// Random/Mazes MAPF instances, plus warehouse runtimes and one city episode.
///
/// | instance | A | B | C |
/// |----------|---|---|---|
/// | 1 | 100, 1638 collisions | 125 | 200 |
/// | 2 | unsolved | 40 | 50 |
/// | 3 | 60 | 60 | 75 |
/// | 4 | unsolved | unsolved, 16384 collisions | unsolved |
pub fn metric_fixture() -> Vec<gridmapf::harness::EpisodeRecord> {
    use gridmapf::env::{CollisionSystem, CollisionTally, OnTarget, Problem};
    use gridmapf::harness::EpisodeRecord;
    use gridmapf::maps_io::{AlgorithmConfig, DatasetTag, InstanceSpec};

    let spec = |tag: DatasetTag, map: &str, agents: usize, seed: u64| InstanceSpec {
        map_name: map.into(),
        seed,
        num_agents: agents,
        max_episode_steps: 256,
        problem: Problem::Mapf,
        dataset_tag: tag,
        on_target: OnTarget::Nothing,
        collision_system: CollisionSystem::Soft,
        obs_radius: 5,
    };
    let record = |alias: &str, spec: InstanceSpec, soc: u64, solved: bool, collisions: u64, runtime: f64| {
        let mut r = EpisodeRecord::failed(spec, &AlgorithmConfig::new(alias, "fixture"), String::new());
        r.error = None;
        r.soc = soc;
        r.csr = solved;
        r.collisions = CollisionTally { vertex: collisions, ..CollisionTally::default() };
        r.episode_length = 256;
        r.runtime_seconds = runtime;
        r
    };
    let instances = [
        spec(DatasetTag::Random, "random-000", 64, 0),
        spec(DatasetTag::Random, "random-001", 64, 0),
        spec(DatasetTag::Mazes, "maze-000", 64, 0),
        spec(DatasetTag::Mazes, "maze-001", 64, 0),
    ];
    // (SoC, solved, collisions) per instance
    type Row = [(u64, bool, u64); 4];
    let table: [(&str, Row); 3] = [
        ("A", [(100, true, 1638), (16384, false, 0), (60, true, 0), (16384, false, 0)]),
        ("B", [(125, true, 0), (40, true, 0), (60, true, 0), (16384, false, 16384)]),
        ("C", [(200, true, 0), (50, true, 0), (75, true, 0), (16384, false, 0)]),
    ];
    let mut out = Vec::new();
    for (alias, row) in table {
        for (inst, (soc, solved, coll)) in instances.iter().zip(row) {
            out.push(record(alias, inst.clone(), soc, solved, coll, 0.5));
        }
    }
    for (alias, t64, t128) in [("A", 2.0, 4.0), ("B", 1.0, 1.0), ("C", 1.0, 4.0)] {
        out.push(record(alias, spec(DatasetTag::Warehouse, "warehouse", 64, 0), 0, false, 0, t64));
        out.push(record(alias, spec(DatasetTag::Warehouse, "warehouse", 128, 0), 0, false, 0, t128));
    }
    for (alias, soc, solved) in [("A", 100, true), ("B", 125, true), ("C", 2048, false)] {
        let mut r = record(alias, spec(DatasetTag::Cities, "city-0", 1, 0), soc, solved, 0, 0.1);
        r.lower_bound_soc = Some(100);
        out.push(r);
    }
    out
}

/// Hand-computed scores for [`metric_fixture`], per algorithm A, B, C.
pub const FIXTURE_PERFORMANCE: [f64; 3] = [0.5, 0.7, 0.525];
pub const FIXTURE_COORDINATION: [f64; 3] = [0.975006103515625, 0.75, 1.0];
pub const FIXTURE_SCALABILITY: [f64; 3] = [1.0, 2.0, 0.5];
pub const FIXTURE_PATHFINDING: [f64; 3] = [1.0, 0.8, 0.0];
/// 95% half-width of A's performance samples [1, 0, 1, 0].
pub const FIXTURE_PERFORMANCE_CI_A: f64 = 0.5658032638058333;

/// 8x8 random map with four agents, after `steps` random-policy steps.
pub fn golden_trajectory(steps: usize) -> gridmapf::viz::Trajectory {
    use gridmapf::env::{Env, GridConfig, OnTarget};
    use gridmapf::obs::export_global_state;
    use gridmapf::solvers::RandomPolicy;

    let config = GridConfig {
        width: 8,
        height: 8,
        density: 0.2,
        num_agents: 4,
        seed: 3,
        max_episode_steps: 64,
        on_target: OnTarget::Disappear,
        ..GridConfig::default()
    };
    let mut env = Env::new(config).unwrap();
    let mut policy = RandomPolicy::new(11);
    let mut actions = vec![Action::Wait; 4];
    let mut traj = gridmapf::viz::Trajectory::new(env.grid_arc().clone());
    traj.push(&export_global_state(&env));
    for _ in 0..steps {
        policy.fill(&mut actions);
        env.step(&actions).unwrap();
        traj.push(&export_global_state(&env));
    }
    traj
}

/// Compares `actual` with `tests/golden/<name>`; rewrites the file instead
/// when `UPDATE_GOLDEN` is set.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        return std::fs::write(&path, actual).map_err(|e| e.to_string());
    }
    let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != actual.as_bytes() {
        return Err(format!(
            "{} differs from the rendered output ({} vs {} bytes)",
            path.display(),
            expected.len(),
            actual.len()
        ));
    }
    Ok(())
}

/// 64 instances: eight random and eight maze maps, two agent counts, two
/// seeds, run with every baseline.
pub fn determinism_config() -> gridmapf::maps_io::EvalConfig {
    use gridmapf::maps_io::{
        suite, AlgorithmConfig, DatasetTag, EnvironmentBlock, EnvironmentSection, EvalConfig, Sweep,
    };
    let block = |dataset, maps: Vec<String>, on_target| EnvironmentBlock {
        dataset,
        map_name: Sweep::from(maps),
        num_agents: Sweep::from(vec![8, 16]),
        seed: Sweep::from(vec![0, 1]),
        max_episode_steps: 64,
        obs_radius: 5,
        collision_system: CollisionSystem::Soft,
        on_target,
    };
    EvalConfig {
        environment: EnvironmentSection::Many(vec![
            block(DatasetTag::Random, (0..8).map(suite::random_map_name).collect(), gridmapf::env::OnTarget::Nothing),
            block(DatasetTag::Mazes, (0..8).map(suite::maze_map_name).collect(), gridmapf::env::OnTarget::Restart),
        ]),
        algorithms: vec![
            AlgorithmConfig::new("random", "random"),
            AlgorithmConfig::new("astar", "astar"),
            AlgorithmConfig::new("greedy", "greedy"),
            AlgorithmConfig::new("pp", "prioritized"),
        ],
        views: Vec::new(),
    }
}

/// JSON Lines with every runtime zeroed.
pub fn jsonl_without_runtime(records: &[gridmapf::harness::EpisodeRecord]) -> Vec<u8> {
    let mut cleaned = records.to_vec();
    for r in &mut cleaned {
        r.runtime_seconds = 0.0;
    }
    let mut out = Vec::new();
    gridmapf::harness::write_records(&cleaned, &mut out).unwrap();
    out
}
