mod common;

use std::collections::BTreeMap;

use gridmapf::env::{CollisionSystem, OnTarget, Problem};
use gridmapf::mapgen::gen_random;
use gridmapf::maps_io::{
    expand_config, ingest_movingai, parse_map_file, sample_instance, slice_tiles, suite, to_map_file, ConfigError,
    DatasetTag, EvalConfig, MapRegistry,
};

const CONFIG: &str = r#"
environment:
  - dataset: random
    map_name:
      grid_search: [random-000, random-001]
    num_agents:
      grid_search: [8, 16]
    seed:
      grid_search: [0, 1, 2]
    max_episode_steps: 64
    collision_system: block_all
    on_target: restart
  - map_name: warehouse
    num_agents: 32
    seed: 7
    max_episode_steps: 128
algorithms:
  - alias: pp
    name: prioritized
    params: {window: 4, horizon: 16}
  - alias: a
    name: astar
views:
  - name: by_agents
    group_by: [algorithm, num_agents]
    metrics: [soc, throughput]
"#;

#[test]
fn yaml_config_expands_in_nested_order() {
    let registry = MapRegistry::new();
    suite::register_generated(&registry).unwrap();
    let config = EvalConfig::from_yaml_str(CONFIG).unwrap();
    let specs = expand_config(&config, &registry).unwrap();
    assert_eq!(specs.len(), 13);
    let first: Vec<(String, usize, u64)> =
        specs[..4].iter().map(|s| (s.map_name.clone(), s.num_agents, s.seed)).collect();
    assert_eq!(
        first,
        [
            ("random-000".into(), 8, 0),
            ("random-000".into(), 8, 1),
            ("random-000".into(), 8, 2),
            ("random-000".into(), 16, 0)
        ]
    );
    assert_eq!(specs[0].problem, Problem::Lmapf);
    assert_eq!(specs[0].collision_system, CollisionSystem::BlockAll);
    assert_eq!(specs[12].dataset_tag, DatasetTag::Custom);
    assert_eq!(specs[12].on_target, OnTarget::Nothing);
    assert_eq!(specs[12].obs_radius, 5);

    let again = EvalConfig::from_yaml_str(&config.to_yaml()).unwrap();
    assert_eq!(again, config);
    assert_eq!(again.canonical_json(), config.canonical_json());
}

#[test]
fn config_errors_name_the_problem() {
    let registry = MapRegistry::new();
    let empty = CONFIG.replace("grid_search: [0, 1, 2]", "grid_search: []");
    let err = EvalConfig::from_yaml_str(&empty).and_then(|c| expand_config(&c, &registry).map(|_| c)).unwrap_err();
    assert!(matches!(err, ConfigError::EmptyGridSearch { field: "seed", block: 0 }), "{err}");

    let config = EvalConfig::from_yaml_str(CONFIG).unwrap();
    let err = expand_config(&config, &registry).unwrap_err();
    assert!(err.to_string().contains("random-000"), "{err}");

    let typo = CONFIG.replace("max_episode_steps: 64", "max_steps: 64");
    assert!(EvalConfig::from_yaml_str(&typo).is_err());
}

#[test]
fn full_benchmark_cardinality() {
    let (registry, cities) = common::full_registry();
    let config = suite::benchmark_config(Problem::Mapf, &cities, Vec::new());
    let specs = expand_config(&config, &registry).unwrap();
    assert_eq!(specs.len(), 3376);
    let mut counts: BTreeMap<DatasetTag, usize> = BTreeMap::new();
    for s in &specs {
        *counts.entry(s.dataset_tag).or_default() += 1;
    }
    let expected = [
        (DatasetTag::Random, 768),
        (DatasetTag::Mazes, 768),
        (DatasetTag::Warehouse, 768),
        (DatasetTag::Puzzles, 480),
        (DatasetTag::Cities, 80),
        (DatasetTag::CitiesTiles, 512),
    ];
    assert_eq!(counts, expected.into_iter().collect());

    for spec in specs.iter().step_by(17) {
        let map = registry.get(&spec.map_name).unwrap();
        let (starts, goals) = sample_instance(&map, spec.num_agents, spec.seed).unwrap();
        assert_eq!(starts.len(), spec.num_agents);
        assert_eq!(goals.len(), spec.num_agents);
    }

    let lifelong = expand_config(&suite::benchmark_config(Problem::Lmapf, &cities, Vec::new()), &registry).unwrap();
    assert_eq!(lifelong.len(), 3376 - 80);
    assert!(lifelong.iter().all(|s| s.problem == Problem::Lmapf));
}

#[test]
fn movingai_ingest_and_tiles() {
    let map = ingest_movingai(&common::synthetic_city(1)).unwrap();
    assert_eq!((map.width(), map.height()), (256, 256));
    let reference = gen_random(256, 256, 0.2, 1).unwrap();
    assert_eq!(map.raster(), reference.raster());

    let tiles = slice_tiles(&map.clone().with_name("c"), 64).unwrap();
    assert_eq!(tiles.len(), 16);
    assert_eq!(tiles[5].name(), Some("c-05"));
    // tile 5 is row 1, column 1
    for r in 0..64 {
        for c in 0..64 {
            let p = gridmapf::grid::Pos::new(r, c);
            let q = gridmapf::grid::Pos::new(r + 64, c + 64);
            assert_eq!(tiles[5].is_free(p), map.is_free(q));
        }
    }
    assert!(slice_tiles(&map, 60).is_err());
    assert!(ingest_movingai("type octile\nheight 1\nwidth 2\nmap\n.X\n").is_err());
}

#[test]
fn map_file_round_trip() {
    for seed in 0..20 {
        let map = gen_random(13, 9, 0.3, seed).unwrap().with_name(format!("m{seed}"));
        let back = parse_map_file(&to_map_file(&map)).unwrap();
        assert_eq!(back.raster(), map.raster());
        assert_eq!(back.name(), map.name());
    }
}
