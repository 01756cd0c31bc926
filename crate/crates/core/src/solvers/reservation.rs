/// Space-time ledger of committed plans over `t = 0..=horizon`.
///
/// Vertex entries record which agent holds `(cell, t)`. Edge entries record,
/// for every agent arriving at `to` at time `t`, the cell it came from; a
/// move `to -> from` at the same `t` would swap with it.
#[derive(Clone, Debug)]
pub struct ReservationTable {
    cells: usize,
    horizon: usize,
    vertex: Vec<u32>,
    came_from: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
}

const NONE: u32 = u32::MAX;

impl ReservationTable {
    pub fn new(cells: usize, horizon: usize) -> Self {
        let n = cells * (horizon + 1);
        Self { cells, horizon, vertex: vec![NONE; n], came_from: vec![NONE; n], stamp: vec![0; n], epoch: 1 }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Forgets every reservation in O(1).
    pub fn clear(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }

    #[inline]
    fn slot(&self, cell: usize, t: usize) -> usize {
        debug_assert!(cell < self.cells && t <= self.horizon);
        t * self.cells + cell
    }

    /// Agent holding `(cell, t)`, if any.
    #[inline]
    pub fn holder(&self, cell: usize, t: usize) -> Option<usize> {
        let s = self.slot(cell, t);
        (self.stamp[s] == self.epoch).then(|| self.vertex[s] as usize)
    }

    #[inline]
    pub fn vertex_free(&self, cell: usize, t: usize) -> bool {
        self.stamp[self.slot(cell, t)] != self.epoch
    }

    /// Whether moving `from -> to` arriving at `t` avoids swapping with a
    /// reserved `to -> from` move.
    #[inline]
    pub fn edge_free(&self, from: usize, to: usize, t: usize) -> bool {
        let s = self.slot(from, t);
        !(self.stamp[s] == self.epoch && self.came_from[s] == to as u32)
    }

    /// Reserves a path given as cell indices for `t = 0, 1, ...`; a path
    /// shorter than the horizon keeps its last cell until the horizon.
    pub fn reserve_path(&mut self, agent: usize, path: &[usize]) {
        let last = *path.last().expect("non-empty path");
        for t in 0..=self.horizon {
            let cell = path.get(t).copied().unwrap_or(last);
            let prev = if t == 0 { cell } else { path.get(t - 1).copied().unwrap_or(last) };
            let s = self.slot(cell, t);
            debug_assert!(self.stamp[s] != self.epoch, "double reservation of cell {cell} at t={t}");
            self.stamp[s] = self.epoch;
            self.vertex[s] = agent as u32;
            self.came_from[s] = prev as u32;
        }
    }
}
