//! Seeded map generators: random, maze and warehouse.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{MapError, MapFamily, MapGrid};
use crate::rng::{self, Stream};

#[derive(Debug, Error, PartialEq)]
pub enum MapGenError {
    #[error("density must be in [0, 1), got {0}")]
    InvalidDensity(f64),
    #[error("loop probability must be in [0, 1], got {0}")]
    InvalidLoopProb(f64),
    #[error("maze needs at least 3x3 cells, got {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("invalid warehouse parameters: {0}")]
    InvalidWarehouse(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Every cell is independently an obstacle with probability `density`.
pub fn gen_random(width: usize, height: usize, density: f64, seed: u64) -> Result<MapGrid, MapGenError> {
    if !(0.0..1.0).contains(&density) {
        return Err(MapGenError::InvalidDensity(density));
    }
    let mut rng = rng::stream(seed, Stream::MapRaster);
    let cells = (0..width * height).map(|_| rng.gen_bool(density)).collect();
    Ok(MapGrid::new(width, height, cells)?.with_family(MapFamily::Random))
}

/// Default probability of knocking out an interior maze wall.
pub const DEFAULT_LOOP_PROB: f64 = 0.1;

/// Randomised depth-first maze on the odd-coordinate lattice with 1-cell
/// corridors; afterwards every remaining wall between two lattice cells is
/// removed with probability `loop_prob`.
pub fn gen_maze(width: usize, height: usize, seed: u64, loop_prob: f64) -> Result<MapGrid, MapGenError> {
    if width < 3 || height < 3 {
        return Err(MapGenError::TooSmall { width, height });
    }
    if !(0.0..=1.0).contains(&loop_prob) {
        return Err(MapGenError::InvalidLoopProb(loop_prob));
    }
    let mut rng = rng::stream(seed, Stream::MapLayout);
    let mut wall = vec![true; width * height];
    let idx = |r: usize, c: usize| r * width + c;
    // lattice cells live at odd (r, c) with r <= height-2, c <= width-2
    let lat_rows = (height - 1) / 2;
    let lat_cols = (width - 1) / 2;
    let lat = |r: usize, c: usize| (2 * r + 1, 2 * c + 1);

    let mut visited = vec![false; lat_rows * lat_cols];
    let start = (rng.gen_range(0..lat_rows), rng.gen_range(0..lat_cols));
    visited[start.0 * lat_cols + start.1] = true;
    let (sr, sc) = lat(start.0, start.1);
    wall[idx(sr, sc)] = false;
    let mut stack = vec![start];
    let mut options: Vec<(usize, usize)> = Vec::with_capacity(4);
    while let Some(&(r, c)) = stack.last() {
        options.clear();
        if r > 0 && !visited[(r - 1) * lat_cols + c] {
            options.push((r - 1, c));
        }
        if r + 1 < lat_rows && !visited[(r + 1) * lat_cols + c] {
            options.push((r + 1, c));
        }
        if c > 0 && !visited[r * lat_cols + c - 1] {
            options.push((r, c - 1));
        }
        if c + 1 < lat_cols && !visited[r * lat_cols + c + 1] {
            options.push((r, c + 1));
        }
        let Some(&(nr, nc)) = options.choose(&mut rng) else {
            stack.pop();
            continue;
        };
        visited[nr * lat_cols + nc] = true;
        let (ar, ac) = lat(r, c);
        let (br, bc) = lat(nr, nc);
        wall[idx((ar + br) / 2, (ac + bc) / 2)] = false;
        wall[idx(br, bc)] = false;
        stack.push((nr, nc));
    }

    if loop_prob > 0.0 {
        for r in 1..height - 1 {
            for c in 1..width - 1 {
                if !wall[idx(r, c)] {
                    continue;
                }
                let between_cols = r % 2 == 1 && c % 2 == 0 && c < 2 * lat_cols - 1;
                let between_rows = c % 2 == 1 && r % 2 == 0 && r < 2 * lat_rows - 1;
                if (between_cols || between_rows) && rng.gen_bool(loop_prob) {
                    wall[idx(r, c)] = false;
                }
            }
        }
    }
    Ok(MapGrid::new(width, height, wall)?.with_family(MapFamily::Maze))
}

/// Rectangular shelf blocks inside a free border.
///
/// The defaults produce a 33 x 46 (rows x cols) layout: 8 rows of 3 shelves,
/// each 10 wide and 2 tall, with 1-cell aisles between shelf rows, 3-cell
/// aisles between shelf columns and a 5-cell free margin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WarehouseParams {
    pub shelf_width: usize,
    pub shelf_height: usize,
    /// Gap between horizontally adjacent shelves.
    pub aisle_width: usize,
    /// Gap between shelf rows.
    pub row_aisle_width: usize,
    pub shelves_per_row: usize,
    pub shelf_rows: usize,
    pub border_margin: usize,
}

impl Default for WarehouseParams {
    fn default() -> Self {
        Self {
            shelf_width: 10,
            shelf_height: 2,
            aisle_width: 3,
            row_aisle_width: 1,
            shelves_per_row: 3,
            shelf_rows: 8,
            border_margin: 5,
        }
    }
}

impl WarehouseParams {
    pub fn width(&self) -> usize {
        2 * self.border_margin + self.shelves_per_row * self.shelf_width + (self.shelves_per_row - 1) * self.aisle_width
    }

    pub fn height(&self) -> usize {
        2 * self.border_margin + self.shelf_rows * self.shelf_height + (self.shelf_rows - 1) * self.row_aisle_width
    }

    fn validate(&self) -> Result<(), MapGenError> {
        let fields = [
            ("shelf_width", self.shelf_width),
            ("shelf_height", self.shelf_height),
            ("aisle_width", self.aisle_width),
            ("row_aisle_width", self.row_aisle_width),
            ("shelves_per_row", self.shelves_per_row),
            ("shelf_rows", self.shelf_rows),
            ("border_margin", self.border_margin),
        ];
        for (name, v) in fields {
            if v == 0 {
                return Err(MapGenError::InvalidWarehouse(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

pub fn gen_warehouse(params: &WarehouseParams) -> Result<MapGrid, MapGenError> {
    params.validate()?;
    let (w, h) = (params.width(), params.height());
    let mut cells = vec![false; w * h];
    for sr in 0..params.shelf_rows {
        let top = params.border_margin + sr * (params.shelf_height + params.row_aisle_width);
        for sc in 0..params.shelves_per_row {
            let left = params.border_margin + sc * (params.shelf_width + params.aisle_width);
            for r in top..top + params.shelf_height {
                cells[r * w + left..r * w + left + params.shelf_width].fill(true);
            }
        }
    }
    let map = MapGrid::new(w, h, cells)?.with_family(MapFamily::Warehouse);
    if map.components().count() != 1 {
        return Err(MapGenError::InvalidWarehouse("free space is disconnected".into()));
    }
    Ok(map)
}
