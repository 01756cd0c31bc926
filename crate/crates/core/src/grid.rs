use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A grid cell as `(row, col)`. Coordinates are signed so that a move off the
/// map edge is representable before it gets shielded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(i32, i32)", into = "(i32, i32)")]
pub struct Pos {
    pub row: i32,
    pub col: i32,
}

impl Pos {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }

    pub fn offset(self, dr: i32, dc: i32) -> Self {
        Self::new(self.row + dr, self.col + dc)
    }

    pub fn manhattan(self, other: Pos) -> u32 {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

impl From<(i32, i32)> for Pos {
    fn from((row, col): (i32, i32)) -> Self {
        Self { row, col }
    }
}

impl From<Pos> for (i32, i32) {
    fn from(p: Pos) -> Self {
        (p.row, p.col)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Where a map came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFamily {
    Random,
    Maze,
    Warehouse,
    Imported,
    #[default]
    Custom,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("raster has {got} cells, expected {width}x{height}")]
    SizeMismatch { width: usize, height: usize, got: usize },
    #[error("map has no free cells")]
    NoFreeCells,
    #[error("map dimensions must be non-zero")]
    Empty,
}

/// Immutable obstacle raster, row-major, `true` = obstacle.
///
/// Equality compares dimensions and raster only; `name` and `family` are
/// descriptive metadata.
#[derive(Clone, Debug)]
pub struct MapGrid {
    width: usize,
    height: usize,
    obstacles: Vec<bool>,
    name: Option<String>,
    family: MapFamily,
}

impl PartialEq for MapGrid {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.obstacles == other.obstacles
    }
}

impl Eq for MapGrid {}

impl MapGrid {
    pub fn new(width: usize, height: usize, obstacles: Vec<bool>) -> Result<Self, MapError> {
        if width == 0 || height == 0 {
            return Err(MapError::Empty);
        }
        if obstacles.len() != width * height {
            return Err(MapError::SizeMismatch { width, height, got: obstacles.len() });
        }
        if obstacles.iter().all(|&o| o) {
            return Err(MapError::NoFreeCells);
        }
        Ok(Self { width, height, obstacles, name: None, family: MapFamily::Custom })
    }

    /// An obstacle-free `width` x `height` map.
    pub fn empty(width: usize, height: usize) -> Result<Self, MapError> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_family(mut self, family: MapFamily) -> Self {
        self.family = family;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_cells(&self) -> usize {
        self.obstacles.len()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn family(&self) -> MapFamily {
        self.family
    }

    pub fn raster(&self) -> &[bool] {
        &self.obstacles
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        p.row >= 0 && p.col >= 0 && (p.row as usize) < self.height && (p.col as usize) < self.width
    }

    /// Row-major index of an in-bounds cell.
    #[inline]
    pub fn index(&self, p: Pos) -> usize {
        debug_assert!(self.in_bounds(p));
        p.row as usize * self.width + p.col as usize
    }

    #[inline]
    pub fn pos(&self, index: usize) -> Pos {
        Pos::new((index / self.width) as i32, (index % self.width) as i32)
    }

    /// `true` for in-bounds obstacle-free cells.
    #[inline]
    pub fn is_free(&self, p: Pos) -> bool {
        self.in_bounds(p) && !self.obstacles[self.index(p)]
    }

    #[inline]
    pub fn is_obstacle_at(&self, index: usize) -> bool {
        self.obstacles[index]
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Pos> + '_ {
        self.obstacles.iter().enumerate().filter(|(_, &o)| !o).map(|(i, _)| self.pos(i))
    }

    pub fn num_free(&self) -> usize {
        self.obstacles.iter().filter(|&&o| !o).count()
    }

    /// Free 4-neighbours of `p` in UP, DOWN, LEFT, RIGHT order.
    pub fn free_neighbors(&self, p: Pos) -> impl Iterator<Item = Pos> + '_ {
        [(-1, 0), (1, 0), (0, -1), (0, 1)]
            .into_iter()
            .map(move |(dr, dc)| p.offset(dr, dc))
            .filter(|&q| self.is_free(q))
    }

    /// Labels the 4-connected components of free space.
    pub fn components(&self) -> Components {
        let mut label = vec![Components::NONE; self.num_cells()];
        let mut cells = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.num_cells() {
            if self.obstacles[start] || label[start] != Components::NONE {
                continue;
            }
            let id = cells.len() as u32;
            let mut members = vec![start as u32];
            label[start] = id;
            queue.push_back(start);
            while let Some(cur) = queue.pop_front() {
                for q in self.free_neighbors(self.pos(cur)) {
                    let qi = self.index(q);
                    if label[qi] == Components::NONE {
                        label[qi] = id;
                        members.push(qi as u32);
                        queue.push_back(qi);
                    }
                }
            }
            members.sort_unstable();
            cells.push(members);
        }
        Components { label, cells }
    }
}

/// Connected components of a map's free cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    label: Vec<u32>,
    cells: Vec<Vec<u32>>,
}

impl Components {
    pub const NONE: u32 = u32::MAX;

    /// Component id of a cell index, or `None` for obstacles.
    pub fn of(&self, index: usize) -> Option<u32> {
        let l = self.label[index];
        (l != Self::NONE).then_some(l)
    }

    pub fn count(&self) -> usize {
        self.cells.len()
    }

    /// Sorted cell indices of component `id`.
    pub fn members(&self, id: u32) -> &[u32] {
        &self.cells[id as usize]
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        let la = self.label[a];
        la != Self::NONE && la == self.label[b]
    }
}
