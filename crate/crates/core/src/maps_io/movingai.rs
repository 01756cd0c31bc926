use thiserror::Error;

use crate::grid::{MapError, MapFamily, MapGrid};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MovingAiError {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("expected {expected} map rows, found {got}")]
    RowCount { expected: usize, got: usize },
    #[error("map row {row} has {got} cells, expected {expected}")]
    RowWidth { row: usize, expected: usize, got: usize },
    #[error("unknown terrain {ch:?} at row {row}, column {col}")]
    UnknownTerrain { ch: char, row: usize, col: usize },
    #[error("tile size {tile} does not divide {width}x{height}")]
    TileSize { tile: usize, width: usize, height: usize },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Converts a MovingAI `.map` file. Only `.` and `G` are passable; `@`, `O`,
/// `T`, `S` and `W` are obstacles.
pub fn ingest_movingai(text: &str) -> Result<MapGrid, MovingAiError> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    let mut height = None;
    let mut width = None;
    let mut saw_type = false;
    loop {
        let line = lines.next().ok_or_else(|| MovingAiError::Header("missing `map` line".into()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let value = parts.next();
        match key {
            "type" => {
                if value.is_none() {
                    return Err(MovingAiError::Header("`type` without a value".into()));
                }
                saw_type = true;
            }
            "height" => height = Some(parse_dim("height", value)?),
            "width" => width = Some(parse_dim("width", value)?),
            "map" => break,
            other => return Err(MovingAiError::Header(format!("unexpected line {other:?}"))),
        }
    }
    if !saw_type {
        return Err(MovingAiError::Header("missing `type` line".into()));
    }
    let height = height.ok_or_else(|| MovingAiError::Header("missing `height`".into()))?;
    let width = width.ok_or_else(|| MovingAiError::Header("missing `width`".into()))?;

    let rows: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
    if rows.len() != height {
        return Err(MovingAiError::RowCount { expected: height, got: rows.len() });
    }
    let mut cells = Vec::with_capacity(width * height);
    for (r, row) in rows.iter().enumerate() {
        let got = row.chars().count();
        if got != width {
            return Err(MovingAiError::RowWidth { row: r, expected: width, got });
        }
        for (c, ch) in row.chars().enumerate() {
            cells.push(match ch {
                '.' | 'G' => false,
                '@' | 'O' | 'T' | 'S' | 'W' => true,
                _ => return Err(MovingAiError::UnknownTerrain { ch, row: r, col: c }),
            });
        }
    }
    Ok(MapGrid::new(width, height, cells)?.with_family(MapFamily::Imported))
}

fn parse_dim(key: &str, value: Option<&str>) -> Result<usize, MovingAiError> {
    value
        .and_then(|v| v.parse().ok())
        .filter(|&v: &usize| v > 0)
        .ok_or_else(|| MovingAiError::Header(format!("`{key}` needs a positive integer")))
}

/// Cuts a map into non-overlapping `tile` x `tile` pieces in row-major
/// order, named `<parent>-<index>`. Tiles without free cells are skipped.
pub fn slice_tiles(map: &MapGrid, tile: usize) -> Result<Vec<MapGrid>, MovingAiError> {
    let (w, h) = (map.width(), map.height());
    if tile == 0 || w % tile != 0 || h % tile != 0 {
        return Err(MovingAiError::TileSize { tile, width: w, height: h });
    }
    let parent = map.name().unwrap_or("map");
    let mut tiles = Vec::new();
    let mut index = 0;
    for tr in 0..h / tile {
        for tc in 0..w / tile {
            let mut cells = Vec::with_capacity(tile * tile);
            for r in tr * tile..(tr + 1) * tile {
                cells.extend_from_slice(&map.raster()[r * w + tc * tile..r * w + (tc + 1) * tile]);
            }
            let name = format!("{parent}-{index:02}");
            index += 1;
            match MapGrid::new(tile, tile, cells) {
                Ok(t) => tiles.push(t.with_name(name).with_family(map.family())),
                Err(MapError::NoFreeCells) => continue,
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(tiles)
}
