use thiserror::Error;

use crate::grid::{MapError, MapGrid};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AsciiError {
    #[error("ragged rows: row {row} has {got} cells, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },
    #[error("unknown character {ch:?} at row {row}, column {col}")]
    UnknownChar { ch: char, row: usize, col: usize },
    #[error("map text has no rows")]
    Empty,
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Parses a block of `.` (free) and `#` (obstacle) rows.
pub fn parse_ascii(text: &str) -> Result<MapGrid, AsciiError> {
    let rows: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let rows: Vec<&str> = trim_blank_edges(&rows);
    if rows.is_empty() {
        return Err(AsciiError::Empty);
    }
    let width = rows[0].chars().count();
    let mut cells = Vec::with_capacity(width * rows.len());
    for (r, line) in rows.iter().enumerate() {
        let got = line.chars().count();
        if got != width {
            return Err(AsciiError::Ragged { row: r, expected: width, got });
        }
        for (c, ch) in line.chars().enumerate() {
            cells.push(match ch {
                '.' => false,
                '#' => true,
                _ => return Err(AsciiError::UnknownChar { ch, row: r, col: c }),
            });
        }
    }
    Ok(MapGrid::new(width, rows.len(), cells)?)
}

fn trim_blank_edges<'a>(rows: &[&'a str]) -> Vec<&'a str> {
    let first = rows.iter().position(|r| !r.trim().is_empty());
    let last = rows.iter().rposition(|r| !r.trim().is_empty());
    match (first, last) {
        (Some(a), Some(b)) => rows[a..=b].to_vec(),
        _ => Vec::new(),
    }
}

/// Inverse of [`parse_ascii`]; rows are newline-separated, no trailing newline.
pub fn to_ascii(map: &MapGrid) -> String {
    let mut out = String::with_capacity(map.num_cells() + map.height());
    for (r, row) in map.raster().chunks(map.width()).enumerate() {
        if r > 0 {
            out.push('\n');
        }
        out.extend(row.iter().map(|&o| if o { '#' } else { '.' }));
    }
    out
}

/// Parses a map file: an optional `! name` line followed by an ASCII block.
pub fn parse_map_file(text: &str) -> Result<MapGrid, AsciiError> {
    let mut name = None;
    let mut body = text;
    if let Some(rest) = text.trim_start().strip_prefix('!') {
        let (line, tail) = rest.split_once('\n').unwrap_or((rest, ""));
        name = Some(line.trim().to_string());
        body = tail;
    }
    let map = parse_ascii(body)?;
    Ok(match name {
        Some(n) if !n.is_empty() => map.with_name(n),
        _ => map,
    })
}

/// Map file text with a name header when the map has a name.
pub fn to_map_file(map: &MapGrid) -> String {
    let mut out = String::new();
    if let Some(name) = map.name() {
        out.push_str("! ");
        out.push_str(name);
        out.push('\n');
    }
    out.push_str(&to_ascii(map));
    out.push('\n');
    out
}
