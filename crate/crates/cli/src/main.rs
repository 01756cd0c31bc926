//! `gridmapf` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gridmapf", version, about = "Grid multi-agent pathfinding simulator and benchmark tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Random,
    Maze,
    Warehouse,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated map as ASCII (`.` free, `#` obstacle).
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        /// Random and maze maps only; defaults to 21.
        #[arg(long)]
        width: Option<usize>,
        /// Random and maze maps only; defaults to 21.
        #[arg(long)]
        height: Option<usize>,
        /// Obstacle density of random maps.
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// Wall removal probability of mazes.
        #[arg(long, default_value_t = gridmapf::mapgen::DEFAULT_LOOP_PROB)]
        loop_prob: f64,
        /// Shelf rows of a warehouse.
        #[arg(long)]
        shelf_rows: Option<usize>,
        /// Shelves per row of a warehouse.
        #[arg(long)]
        shelves_per_row: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a MovingAI `.map` file, optionally slicing it into square tiles.
    Ingest {
        #[arg(long)]
        movingai: PathBuf,
        #[arg(long)]
        tile: Option<usize>,
        /// Map name; defaults to the file stem.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an evaluation config and write JSON Lines results.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
        /// Directory of extra `.map` files (e.g. ingested cities).
        #[arg(long)]
        maps: Option<PathBuf>,
    },
    /// Measure environment steps and observations per second.
    Bench {
        #[arg(long, default_value_t = 64)]
        agents: usize,
        /// Side of the square random map.
        #[arg(long, default_value_t = 32)]
        size: usize,
        /// Seconds to run; at least 1.
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replay one result line and render it as SVG.
    Render {
        #[arg(long)]
        results: PathBuf,
        /// 0-based line index into the results file.
        #[arg(long)]
        instance: usize,
        #[arg(long)]
        out: PathBuf,
        /// Render a single frame at this step instead of an animation.
        #[arg(long)]
        frame: Option<usize>,
        /// Seconds per step in animations.
        #[arg(long, default_value_t = 0.3)]
        step_duration: f64,
        #[arg(long)]
        maps: Option<PathBuf>,
    },
    /// Compute the six aggregate scores from result files.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        results: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate { family, width, height, density, loop_prob, shelf_rows, shelves_per_row, seed, out } => {
            commands::generate(commands::GenerateArgs {
                family,
                width,
                height,
                density,
                loop_prob,
                shelf_rows,
                shelves_per_row,
                seed,
                out,
            })
        }
        Command::Ingest { movingai, tile, name, out } => commands::ingest(&movingai, tile, name, &out),
        Command::Run { config, workers, out, maps } => commands::run(&config, workers, &out, maps.as_deref()),
        Command::Bench { agents, size, duration, density, seed } => {
            commands::bench(agents, size, duration, density, seed)
        }
        Command::Render { results, instance, out, frame, step_duration, maps } => {
            commands::render(&results, instance, &out, frame, step_duration, maps.as_deref())
        }
        Command::Report { results, out } => commands::report(&results, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
