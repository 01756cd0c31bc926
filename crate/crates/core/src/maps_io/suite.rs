//! The six-family benchmark suite.
//!
//! Every generated map is a function of its family and index, so the whole
//! suite is rebuilt from this module rather than shipped as raster files.
//! City maps are the exception: they are ingested by the user and registered
//! with [`register_city`], which also registers their 64 x 64 tiles.

use rand::Rng;

use super::config::{EnvironmentBlock, EnvironmentSection, EvalConfig, Sweep};
use super::AlgorithmConfig;
use super::{parse_ascii, slice_tiles, DatasetTag, MapRegistry, MovingAiError, RegistryError};
use crate::env::{CollisionSystem, OnTarget, Problem};
use crate::grid::{MapFamily, MapGrid};
use crate::mapgen::{gen_maze, gen_random, gen_warehouse, WarehouseParams, DEFAULT_LOOP_PROB};
use crate::rng::{self, Stream};

pub const RANDOM_MAPS: usize = 128;
pub const MAZE_MAPS: usize = 128;
pub const CITY_TILE: usize = 64;
pub const TILES_PER_CITY: usize = 16;
pub const CITY_COUNT: usize = 8;

pub const RANDOM_AGENTS: [usize; 6] = [8, 16, 24, 32, 48, 64];
pub const WAREHOUSE_AGENTS: [usize; 6] = [32, 64, 96, 128, 160, 192];
pub const PUZZLE_AGENTS: [usize; 3] = [2, 3, 4];
pub const CITY_TILE_AGENTS: [usize; 4] = [64, 128, 192, 256];

const SIZE_RANGE: std::ops::RangeInclusive<usize> = 17..=21;
const DENSITY_RANGE: std::ops::Range<f64> = 0.15..0.3;
// keeps generator seeds of the two families apart
const MAZE_SEED_OFFSET: u64 = 1 << 32;

/// Hand-authored 5 x 5 puzzles: bottlenecks, rings and swap pockets.
pub const PUZZLES: [&str; 16] = [
    ".....\n.###.\n.....\n.###.\n.....",
    "..#..\n..#..\n.....\n..#..\n..#..",
    ".....\n.#.#.\n.....\n.#.#.\n.....",
    "#...#\n..#..\n.###.\n..#..\n#...#",
    ".....\n####.\n.....\n.####\n.....",
    "..#..\n.....\n#.#.#\n.....\n..#..",
    ".#...\n.#.#.\n.#.#.\n.#.#.\n...#.",
    ".....\n.#.#.\n..#..\n.#.#.\n.....",
    "##.##\n##.##\n.....\n##.##\n##.##",
    "...##\n.#.##\n.....\n##.#.\n##...",
    ".....\n.....\n##.##\n.....\n.....",
    "#...#\n.....\n..#..\n.....\n#...#",
    ".#...\n...#.\n.#...\n...#.\n.#...",
    "..#..\n..#..\n.....\n.....\n.....",
    ".....\n.###.\n.#...\n.#.##\n.....",
    "#.#.#\n.....\n#.#.#\n.....\n#.#.#",
];

pub fn random_map_name(i: usize) -> String {
    format!("random-{i:03}")
}

pub fn maze_map_name(i: usize) -> String {
    format!("maze-{i:03}")
}

pub fn puzzle_map_name(i: usize) -> String {
    format!("puzzle-{i:02}")
}

pub const WAREHOUSE_MAP_NAME: &str = "warehouse";

/// Tile names of an ingested city map.
pub fn city_tile_names(city: &str) -> Vec<String> {
    (0..TILES_PER_CITY).map(|i| format!("{city}-{i:02}")).collect()
}

/// Random map `i`: size and density drawn from the index stream.
pub fn random_map(i: usize) -> MapGrid {
    let mut layout = rng::stream(i as u64, Stream::MapLayout);
    let w = layout.gen_range(SIZE_RANGE);
    let h = layout.gen_range(SIZE_RANGE);
    let density = layout.gen_range(DENSITY_RANGE);
    gen_random(w, h, density, i as u64).expect("suite random parameters are valid").with_name(random_map_name(i))
}

/// Maze map `i`, odd side lengths so corridors meet the border walls.
pub fn maze_map(i: usize) -> MapGrid {
    let seed = MAZE_SEED_OFFSET + i as u64;
    let mut layout = rng::stream(seed, Stream::MapRaster);
    let w = 17 + 2 * layout.gen_range(0..3);
    let h = 17 + 2 * layout.gen_range(0..3);
    gen_maze(w, h, seed, DEFAULT_LOOP_PROB).expect("suite maze parameters are valid").with_name(maze_map_name(i))
}

pub fn puzzle_map(i: usize) -> MapGrid {
    parse_ascii(PUZZLES[i]).expect("puzzle text is valid").with_family(MapFamily::Custom).with_name(puzzle_map_name(i))
}

/// Registers random, maze, warehouse and puzzle maps.
pub fn register_generated(registry: &MapRegistry) -> Result<(), RegistryError> {
    for i in 0..RANDOM_MAPS {
        registry.register(random_map_name(i), random_map(i))?;
    }
    for i in 0..MAZE_MAPS {
        registry.register(maze_map_name(i), maze_map(i))?;
    }
    let warehouse = gen_warehouse(&WarehouseParams::default()).expect("default warehouse is valid");
    registry.register(WAREHOUSE_MAP_NAME, warehouse)?;
    for i in 0..PUZZLES.len() {
        registry.register(puzzle_map_name(i), puzzle_map(i))?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum CityError {
    #[error(transparent)]
    Tiles(#[from] MovingAiError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("city {name:?} yields {got} usable 64x64 tiles, expected {expected}")]
    TileCount { name: String, got: usize, expected: usize },
}

/// Registers a city map and its tiles `<name>-00` .. `<name>-15`.
pub fn register_city(registry: &MapRegistry, name: &str, map: MapGrid) -> Result<(), CityError> {
    let map = map.with_name(name);
    let tiles = slice_tiles(&map, CITY_TILE)?;
    if tiles.len() != TILES_PER_CITY {
        return Err(CityError::TileCount { name: name.to_string(), got: tiles.len(), expected: TILES_PER_CITY });
    }
    registry.register(name, map)?;
    for tile in tiles {
        let tile_name = tile.name().unwrap_or_default().to_string();
        registry.register(tile_name, tile)?;
    }
    Ok(())
}

fn block(
    dataset: DatasetTag,
    maps: Vec<String>,
    agents: &[usize],
    seeds: u64,
    max_episode_steps: u32,
    on_target: OnTarget,
) -> EnvironmentBlock {
    EnvironmentBlock {
        dataset,
        map_name: Sweep::from(maps),
        num_agents: Sweep::from(agents.to_vec()),
        seed: Sweep::from((0..seeds).collect::<Vec<_>>()),
        max_episode_steps,
        obs_radius: 5,
        collision_system: CollisionSystem::Soft,
        on_target,
    }
}

/// The full benchmark for one problem type. `cities` are registry names of
/// ingested city maps. The single-agent Cities block is only part of MAPF.
pub fn benchmark_config(problem: Problem, cities: &[String], algorithms: Vec<AlgorithmConfig>) -> EvalConfig {
    let (on_target, steps) = match problem {
        Problem::Mapf => (OnTarget::Nothing, 128),
        Problem::Lmapf => (OnTarget::Restart, 256),
    };
    let mut blocks = vec![
        block(DatasetTag::Random, (0..RANDOM_MAPS).map(random_map_name).collect(), &RANDOM_AGENTS, 1, steps, on_target),
        block(DatasetTag::Mazes, (0..MAZE_MAPS).map(maze_map_name).collect(), &RANDOM_AGENTS, 1, steps, on_target),
        block(DatasetTag::Warehouse, vec![WAREHOUSE_MAP_NAME.into()], &WAREHOUSE_AGENTS, 128, steps, on_target),
        block(
            DatasetTag::Puzzles,
            (0..PUZZLES.len()).map(puzzle_map_name).collect(),
            &PUZZLE_AGENTS,
            10,
            steps,
            on_target,
        ),
    ];
    if problem == Problem::Mapf && !cities.is_empty() {
        blocks.push(block(DatasetTag::Cities, cities.to_vec(), &[1], 10, 2048, OnTarget::Nothing));
    }
    if !cities.is_empty() {
        let tiles = cities.iter().flat_map(|c| city_tile_names(c)).collect();
        blocks.push(block(DatasetTag::CitiesTiles, tiles, &CITY_TILE_AGENTS, 1, 256, on_target));
    }
    EvalConfig { environment: EnvironmentSection::Many(blocks), algorithms, views: Vec::new() }
}
