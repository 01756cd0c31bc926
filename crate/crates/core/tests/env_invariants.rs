mod common;

use std::sync::Arc;

use gridmapf::env::{create_env, Action, CollisionSystem, Env, GridConfig, OnTarget};
use gridmapf::grid::{MapGrid, Pos};
use gridmapf::solvers::RandomPolicy;
use proptest::prelude::*;

fn mode(block_all: bool) -> CollisionSystem {
    if block_all {
        CollisionSystem::BlockAll
    } else {
        CollisionSystem::Soft
    }
}

fn on_target(k: u8) -> OnTarget {
    match k % 3 {
        0 => OnTarget::Nothing,
        1 => OnTarget::Disappear,
        _ => OnTarget::Restart,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_walks_keep_occupancy_sound(
        seed in 0u64..10_000,
        size in 6usize..16,
        agents in 1usize..12,
        block_all: bool,
        target in 0u8..3,
    ) {
        let config = GridConfig {
            width: size,
            height: size,
            density: 0.2,
            num_agents: agents,
            seed,
            max_episode_steps: 200,
            collision_system: mode(block_all),
            on_target: on_target(target),
            ..GridConfig::default()
        };
        let mut env = Env::new(config).unwrap();
        let mut policy = RandomPolicy::new(seed);
        let mut actions = vec![Action::Wait; agents];
        let mut total = 0;
        while !env.is_done() {
            let before = env.positions().to_vec();
            let was_active = env.active().to_vec();
            policy.fill(&mut actions);
            let out = env.step(&actions).unwrap();
            total += out.collisions.total();
            common::check_step(env.grid(), &before, env.positions(), &was_active).map_err(TestCaseError::fail)?;
            for i in 0..agents {
                if env.is_active(i) {
                    prop_assert_eq!(env.agent_at(env.positions()[i]), Some(i));
                }
            }
            prop_assert!(out.rewards.iter().all(|&r| r == 0.0 || r == 1.0));
        }
        prop_assert_eq!(env.collisions().total(), total);
        let ind = env.episode_indicators().unwrap();
        prop_assert!(ind.makespan <= 200);
        prop_assert!(ind.soc <= 200 * agents as u64);
        prop_assert_eq!(ind.throughput, ind.goals_achieved as f64 / 200.0);
    }

    #[test]
    fn same_seed_same_episode(seed in 0u64..1_000, agents in 1usize..8) {
        let config = GridConfig { width: 10, height: 10, density: 0.25, num_agents: agents, seed,
            max_episode_steps: 50, on_target: OnTarget::Restart, ..GridConfig::default() };
        let run = || {
            let mut env = Env::new(config.clone()).unwrap();
            let mut policy = RandomPolicy::new(seed ^ 0xabc);
            let mut actions = vec![Action::Wait; agents];
            let mut trace = Vec::new();
            while !env.is_done() {
                policy.fill(&mut actions);
                env.step(&actions).unwrap();
                trace.push((env.positions().to_vec(), env.goals().to_vec()));
            }
            (trace, env.episode_indicators().unwrap())
        };
        prop_assert_eq!(run(), run());
    }
}

#[test]
fn lifelong_goal_refresh_stays_reachable() {
    // two disjoint rooms; the refreshed goal must stay in the agent's room
    let raster: Vec<bool> = (0..5 * 2).map(|i| i % 5 == 2).collect();
    let map = Arc::new(MapGrid::new(5, 2, raster).unwrap());
    let config = GridConfig {
        num_agents: 1,
        max_episode_steps: 400,
        on_target: OnTarget::Restart,
        seed: 9,
        ..GridConfig::default()
    };
    let mut env =
        create_env(config, Some(map.clone()), Some(vec![Pos::new(0, 0)]), Some(vec![Pos::new(1, 1)])).unwrap();
    while !env.is_done() {
        let goal = env.goals()[0];
        assert!(goal.col < 2, "goal {goal:?} left the room");
        let step = common::bfs_distance(&map, env.positions()[0], goal).map(|_| {
            let p = env.positions()[0];
            map.free_neighbors(p)
                .find(|&q| common::bfs_distance(&map, q, goal).unwrap() < common::bfs_distance(&map, p, goal).unwrap())
                .and_then(|q| Action::between(p, q))
                .unwrap_or(Action::Wait)
        });
        env.step(&[step.unwrap()]).unwrap();
    }
    assert!(env.goals_achieved() > 100);
}

#[test]
fn agent_on_its_goal_at_creation() {
    let map = Arc::new(MapGrid::empty(3, 3).unwrap());
    let config = GridConfig { num_agents: 2, ..GridConfig::default() };
    let env = create_env(
        config,
        Some(map),
        Some(vec![Pos::new(0, 0), Pos::new(2, 2)]),
        Some(vec![Pos::new(0, 0), Pos::new(2, 1)]),
    )
    .unwrap();
    assert_eq!(env.goal_times(), &[Some(0), None]);
    assert!(!env.is_done());
}
