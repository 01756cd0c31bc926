use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use gridmapf::env::GridConfig;
use gridmapf::harness::{self, render_view, run_episode, run_suite, HarnessError};
use gridmapf::mapgen::{gen_maze, gen_random, gen_warehouse, WarehouseParams};
use gridmapf::maps_io::{
    ingest_movingai, parse_map_file, slice_tiles, suite, to_map_file, AlgorithmConfig, ConfigError, EvalConfig,
    MapRegistry,
};
use gridmapf::metrics::compute_report;
use gridmapf::solvers::make_policy;
use gridmapf::viz::{render_animation, render_frame, RenderStyle};
use thiserror::Error;

use crate::Family;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::NoWorkers | HarnessError::BenchTooShort(_) => CliError::Usage(e.to_string()),
            HarnessError::Pool(_) => CliError::Internal(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Data(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Data(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub struct GenerateArgs {
    pub family: Family,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub density: f64,
    pub loop_prob: f64,
    pub shelf_rows: Option<usize>,
    pub shelves_per_row: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    let usage = |e: gridmapf::mapgen::MapGenError| CliError::Usage(e.to_string());
    let (w, h) = (args.width.unwrap_or(21), args.height.unwrap_or(21));
    let map = match args.family {
        Family::Random => {
            gen_random(w, h, args.density, args.seed).map_err(usage)?.with_name(format!("random-{}", args.seed))
        }
        Family::Maze => {
            gen_maze(w, h, args.seed, args.loop_prob).map_err(usage)?.with_name(format!("maze-{}", args.seed))
        }
        Family::Warehouse => {
            if args.width.is_some() || args.height.is_some() {
                return Err(CliError::Usage(
                    "warehouse size follows from its layout; use --shelf-rows and --shelves-per-row".into(),
                ));
            }
            let defaults = WarehouseParams::default();
            let params = WarehouseParams {
                shelf_rows: args.shelf_rows.unwrap_or(defaults.shelf_rows),
                shelves_per_row: args.shelves_per_row.unwrap_or(defaults.shelves_per_row),
                ..defaults
            };
            gen_warehouse(&params).map_err(usage)?.with_name("warehouse")
        }
    };
    let text = to_map_file(&map);
    match args.out {
        Some(path) => write(&path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn ingest(movingai: &Path, tile: Option<usize>, name: Option<String>, out: &Path) -> Result<()> {
    let text = read(movingai)?;
    let map = ingest_movingai(&text).map_err(|e| CliError::Data(format!("{}: {e}", movingai.display())))?;
    let name = name
        .or_else(|| movingai.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .ok_or_else(|| CliError::Usage("cannot derive a map name; pass --name".into()))?;
    let map = map.with_name(&name);
    write(&out.join(format!("{name}.map")), to_map_file(&map))?;
    let mut written = 1;
    if let Some(tile) = tile {
        let tiles = slice_tiles(&map, tile).map_err(|e| CliError::Usage(e.to_string()))?;
        for t in &tiles {
            write(&out.join(format!("{}.map", t.name().unwrap_or_default())), to_map_file(t))?;
        }
        written += tiles.len();
    }
    println!("wrote {written} maps to {}", out.display());
    Ok(())
}

/// Generated benchmark maps plus every `.map` file in `dir`.
fn registry(dir: Option<&Path>) -> Result<MapRegistry> {
    let registry = MapRegistry::new();
    suite::register_generated(&registry).map_err(|e| CliError::Internal(e.to_string()))?;
    let Some(dir) = dir else { return Ok(registry) };
    let entries = fs::read_dir(dir).map_err(|e| CliError::Data(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "map"))
        .collect();
    files.sort();
    for path in files {
        let map = parse_map_file(&read(&path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let name = match map.name() {
            Some(n) => n.to_string(),
            None => path.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
        };
        registry.register(name, map).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(registry)
}

pub fn run(config_path: &Path, workers: usize, out: &Path, maps: Option<&Path>) -> Result<()> {
    let config = EvalConfig::from_path(config_path)?;
    let registry = registry(maps)?;
    let (records, manifest) = run_suite(&config, &registry, workers)?;
    harness::persist(&records, out)?;

    let stem = out.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    let sibling = |suffix: &str| out.with_file_name(format!("{stem}.{suffix}"));
    let manifest_json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))?;
    write(&sibling("manifest.json"), manifest_json + "\n")?;
    for view in &config.views {
        write(&sibling(&format!("{}.csv", view.name)), render_view(view, &records)?)?;
    }
    println!("{} records ({} failed) -> {}", manifest.record_count, manifest.error_count, out.display());
    Ok(())
}

pub fn bench(agents: usize, size: usize, duration: f64, density: f64, seed: u64) -> Result<()> {
    if !(duration.is_finite() && duration >= 1.0) {
        return Err(CliError::Usage(format!("--duration must be at least 1 second, got {duration}")));
    }
    let config = GridConfig {
        width: size,
        height: size,
        density,
        num_agents: agents,
        seed,
        max_episode_steps: 256,
        ..GridConfig::default()
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = harness::bench_speed(&config, Duration::from_secs_f64(duration)).map_err(|e| match e {
        HarnessError::Env(env) => CliError::Usage(env.to_string()),
        other => other.into(),
    })?;
    println!("agents {agents}, map {size}x{size}, {:.2}s", report.elapsed_seconds);
    println!("SPS {:.0}", report.sps);
    println!("OPS {:.0}", report.ops);
    Ok(())
}

pub fn render(
    results: &Path,
    index: usize,
    out: &Path,
    frame: Option<usize>,
    step_duration: f64,
    maps: Option<&Path>,
) -> Result<()> {
    let records = harness::load(results)?;
    let record = records.get(index).ok_or_else(|| {
        CliError::Data(format!(
            "{} has {} records; --instance {index} is out of range",
            results.display(),
            records.len()
        ))
    })?;
    if let Some(err) = &record.error {
        return Err(CliError::Data(format!("record {index} is a failed episode: {err}")));
    }
    let registry = registry(maps)?;
    let name = &record.instance.map_name;
    let map = registry
        .get(name)
        .ok_or_else(|| CliError::Data(format!("unknown map {name:?}; pass the directory holding it with --maps")))?;
    let alg = AlgorithmConfig {
        alias: record.algorithm_alias.clone(),
        name: record.algorithm_name.clone(),
        params: record.algorithm_params.clone(),
    };
    let mut policy = make_policy(&alg).map_err(|e| CliError::Data(e.to_string()))?;
    let components = Arc::new(map.components());
    let (replayed, trajectory) = run_episode(&record.instance, map, components, &alg, policy.as_mut(), true)?;
    if !replayed.same_outcome(record) {
        return Err(CliError::Data(format!("replaying record {index} gives a different outcome than the stored one")));
    }
    let trajectory = trajectory.ok_or_else(|| CliError::Internal("no trajectory recorded".into()))?;
    let svg = match frame {
        Some(t) if t >= trajectory.len() => {
            return Err(CliError::Usage(format!("--frame {t} is past the last step {}", trajectory.len() - 1)));
        }
        Some(t) => render_frame(&trajectory.state(t), &RenderStyle::default()),
        None => render_animation(&trajectory, step_duration).map_err(|e| CliError::Usage(e.to_string()))?,
    };
    write(out, svg)
}

pub fn report(results: &[PathBuf], out: &Path) -> Result<()> {
    let mut records = Vec::new();
    for path in results {
        records.extend(harness::load(path)?);
    }
    let report = compute_report(&records).map_err(|e| CliError::Data(e.to_string()))?;
    let internal = |e: serde_json::Error| CliError::Internal(e.to_string());
    write(&out.join("metrics.csv"), report.to_csv())?;
    write(&out.join("metrics.json"), serde_json::to_string_pretty(&report).map_err(internal)? + "\n")?;
    write(&out.join("radar.json"), serde_json::to_string_pretty(&report.radar()).map_err(internal)? + "\n")?;
    println!("{} records -> {}", records.len(), out.display());
    Ok(())
}
