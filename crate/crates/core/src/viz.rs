//! SVG and console rendering.
//!
//! Output is a pure function of the input, so identical snapshots produce
//! identical bytes. Animations use SMIL `<animate>` elements only.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::grid::{MapGrid, Pos};
use crate::obs::GlobalState;

/// Fixed per-index palette; index `i` uses `PALETTE[i % len]`.
pub const PALETTE: [&str; 12] = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6", "#bfef45", "#469990", "#9a6324",
    "#800000", "#000075",
];

const FREE_FILL: &str = "#ffffff";
const OBSTACLE_FILL: &str = "#404040";
const GRID_STROKE: &str = "#d0d0d0";

#[derive(Debug, Error, PartialEq)]
pub enum VizError {
    #[error("trajectory has no steps")]
    Empty,
    #[error("step {step}: expected {expected} agents, found {found}")]
    Shape { step: usize, expected: usize, found: usize },
    #[error("step duration must be positive, got {0}")]
    Duration(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    /// Cell side in SVG user units.
    pub cell: u32,
    pub show_goals: bool,
    /// Highlight the `(2r+1)^2` window around one agent: `(agent, r)`.
    pub ego: Option<(usize, usize)>,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self { cell: 16, show_goals: true, ego: None }
    }
}

pub fn agent_color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn center(p: Pos, cell: u32) -> (f64, f64) {
    let c = cell as f64;
    (p.col as f64 * c + c / 2.0, p.row as f64 * c + c / 2.0)
}

fn goal_corner(p: Pos, cell: u32) -> (f64, f64) {
    let c = cell as f64;
    (p.col as f64 * c + c * 0.25, p.row as f64 * c + c * 0.25)
}

fn open_svg(out: &mut String, map: &MapGrid, style: &RenderStyle) {
    let (w, h) = (map.width() as u32 * style.cell, map.height() as u32 * style.cell);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<g stroke="{GRID_STROKE}" stroke-width="0.5">"#);
    for idx in 0..map.num_cells() {
        let p = map.pos(idx);
        let (class, fill) = if map.is_obstacle_at(idx) { ("obstacle", OBSTACLE_FILL) } else { ("free", FREE_FILL) };
        let _ = writeln!(
            out,
            r#"<rect class="{class}" x="{}" y="{}" width="{c}" height="{c}" fill="{fill}"/>"#,
            p.col as u32 * style.cell,
            p.row as u32 * style.cell,
            c = style.cell
        );
    }
    out.push_str("</g>\n");
}

fn ego_rect(out: &mut String, map: &MapGrid, at: Pos, radius: usize, cell: u32) {
    let r = radius as i32;
    let top = (at.row - r).max(0);
    let left = (at.col - r).max(0);
    let bottom = (at.row + r).min(map.height() as i32 - 1);
    let right = (at.col + r).min(map.width() as i32 - 1);
    let _ = writeln!(
        out,
        r##"<rect class="ego" x="{}" y="{}" width="{}" height="{}" fill="#ffff00" fill-opacity="0.2" stroke="#000000"/>"##,
        left as u32 * cell,
        top as u32 * cell,
        (right - left + 1) as u32 * cell,
        (bottom - top + 1) as u32 * cell
    );
}

/// One frame: cells, goals of active agents, then active agents.
pub fn render_frame(state: &GlobalState, style: &RenderStyle) -> String {
    let map = state.map();
    let mut out = String::new();
    open_svg(&mut out, map, style);
    if let Some((agent, radius)) = style.ego {
        if state.active.get(agent).copied().unwrap_or(false) {
            ego_rect(&mut out, map, state.positions[agent], radius, style.cell);
        }
    }
    let half = style.cell as f64 / 2.0;
    if style.show_goals {
        for (i, &g) in state.goals.iter().enumerate() {
            if !state.active[i] {
                continue;
            }
            let (x, y) = goal_corner(g, style.cell);
            let _ = writeln!(
                out,
                r#"<rect class="goal" data-agent="{i}" x="{x}" y="{y}" width="{half}" height="{half}" fill="none" stroke="{}" stroke-width="2"/>"#,
                agent_color(i)
            );
        }
    }
    for (i, &p) in state.positions.iter().enumerate() {
        if !state.active[i] {
            continue;
        }
        let (cx, cy) = center(p, style.cell);
        let _ = writeln!(
            out,
            r#"<circle class="agent" data-agent="{i}" cx="{cx}" cy="{cy}" r="{}" fill="{}"/>"#,
            half * 0.8,
            agent_color(i)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Per-step history of one episode.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub map: Arc<MapGrid>,
    pub positions: Vec<Vec<Pos>>,
    pub goals: Vec<Vec<Pos>>,
    pub active: Vec<Vec<bool>>,
}

impl Trajectory {
    pub fn new(map: Arc<MapGrid>) -> Self {
        Self { map, positions: Vec::new(), goals: Vec::new(), active: Vec::new() }
    }

    pub fn push(&mut self, state: &GlobalState) {
        self.positions.push(state.positions.clone());
        self.goals.push(state.goals.clone());
        self.active.push(state.active.clone());
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn num_agents(&self) -> usize {
        self.positions.first().map_or(0, Vec::len)
    }

    /// Snapshot at `step`.
    pub fn state(&self, step: usize) -> GlobalState {
        GlobalState {
            map: Some(self.map.clone()),
            positions: self.positions[step].clone(),
            goals: self.goals[step].clone(),
            active: self.active[step].clone(),
            step: step as u32,
        }
    }

    pub fn validate(&self) -> Result<(), VizError> {
        if self.is_empty() {
            return Err(VizError::Empty);
        }
        let n = self.num_agents();
        if self.goals.len() != self.len() || self.active.len() != self.len() {
            return Err(VizError::Shape { step: self.goals.len().min(self.active.len()), expected: n, found: 0 });
        }
        for step in 0..self.len() {
            for found in [self.positions[step].len(), self.goals[step].len(), self.active[step].len()] {
                if found != n {
                    return Err(VizError::Shape { step, expected: n, found });
                }
            }
        }
        Ok(())
    }
}

fn join<T>(items: impl Iterator<Item = T>, f: impl Fn(T) -> String) -> String {
    items.map(f).collect::<Vec<_>>().join(";")
}

/// Animated SVG with `step_duration` seconds per step. A one-step
/// trajectory renders as a static frame.
pub fn render_animation(traj: &Trajectory, step_duration: f64) -> Result<String, VizError> {
    traj.validate()?;
    if step_duration.is_nan() || step_duration <= 0.0 {
        return Err(VizError::Duration(step_duration));
    }
    let style = RenderStyle::default();
    if traj.len() == 1 {
        return Ok(render_frame(&traj.state(0), &style));
    }
    let steps = traj.len();
    let dur = (steps - 1) as f64 * step_duration;
    let key_times = join(0..steps, |t| (t as f64 / (steps - 1) as f64).to_string());
    let anim = |attr: &str, values: String, mode: &str| {
        format!(
            r#"<animate attributeName="{attr}" dur="{dur}s" fill="freeze" calcMode="{mode}" keyTimes="{key_times}" values="{values}"/>"#
        )
    };
    let opacity = |i: usize| join(0..steps, |t| if traj.active[t][i] { "1" } else { "0" }.to_string());

    let mut out = String::new();
    open_svg(&mut out, &traj.map, &style);
    let half = style.cell as f64 / 2.0;
    for i in 0..traj.num_agents() {
        let (x, y) = goal_corner(traj.goals[0][i], style.cell);
        let xs = join(0..steps, |t| goal_corner(traj.goals[t][i], style.cell).0.to_string());
        let ys = join(0..steps, |t| goal_corner(traj.goals[t][i], style.cell).1.to_string());
        let _ = writeln!(
            out,
            r#"<rect class="goal" data-agent="{i}" x="{x}" y="{y}" width="{half}" height="{half}" fill="none" stroke="{}" stroke-width="2">"#,
            agent_color(i)
        );
        let _ = writeln!(
            out,
            "{}\n{}\n{}\n</rect>",
            anim("x", xs, "discrete"),
            anim("y", ys, "discrete"),
            anim("opacity", opacity(i), "discrete")
        );
    }
    for i in 0..traj.num_agents() {
        let (cx, cy) = center(traj.positions[0][i], style.cell);
        let xs = join(0..steps, |t| center(traj.positions[t][i], style.cell).0.to_string());
        let ys = join(0..steps, |t| center(traj.positions[t][i], style.cell).1.to_string());
        let _ = writeln!(
            out,
            r#"<circle class="agent" data-agent="{i}" cx="{cx}" cy="{cy}" r="{}" fill="{}">"#,
            half * 0.8,
            agent_color(i)
        );
        let _ = writeln!(
            out,
            "{}\n{}\n{}\n</circle>",
            anim("cx", xs, "linear"),
            anim("cy", ys, "linear"),
            anim("opacity", opacity(i), "linear")
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Console glyph for agent `i`: `0-9`, `a-z`, `A-Z`, then `*`.
pub fn agent_glyph(i: usize) -> char {
    const GLYPHS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    GLYPHS.get(i).map_or('*', |&b| b as char)
}

/// Row-major text: `#` obstacle, `.` free, `+` goal of an active agent,
/// agent glyphs on top. Rows are separated by `\n` with no trailing newline.
pub fn render_console(state: &GlobalState) -> String {
    let map = state.map();
    let mut cells: Vec<char> = (0..map.num_cells()).map(|i| if map.is_obstacle_at(i) { '#' } else { '.' }).collect();
    for (i, &g) in state.goals.iter().enumerate() {
        if state.active[i] {
            cells[map.index(g)] = '+';
        }
    }
    for (i, &p) in state.positions.iter().enumerate() {
        if state.active[i] {
            cells[map.index(p)] = agent_glyph(i);
        }
    }
    cells.chunks(map.width()).map(|row| row.iter().collect::<String>()).collect::<Vec<_>>().join("\n")
}
