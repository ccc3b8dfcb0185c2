//! Toroidal window, PPP sampling and a uniform-grid spatial index.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::SimError;

pub type Point = [f64; 2];

/// Square window of side `side` whose opposite edges are identified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub side: f64,
}

impl Window {
    pub fn new(side: f64) -> Result<Self, SimError> {
        if side > 0.0 && side.is_finite() {
            Ok(Self { side })
        } else {
            Err(SimError::InvalidSettings(format!("window side must be > 0 (got {side})")))
        }
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    fn wrap(&self, d: f64) -> f64 {
        let d = d.abs();
        let d = if d < self.side { d } else { d % self.side };
        d.min(self.side - d)
    }

    /// Squared wrap-around Euclidean distance.
    pub fn distance_squared(&self, a: Point, b: Point) -> f64 {
        let dx = self.wrap(a[0] - b[0]);
        let dy = self.wrap(a[1] - b[1]);
        dx * dx + dy * dy
    }

    /// Wrap-around Euclidean distance.
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        self.distance_squared(a, b).sqrt()
    }
}

/// Homogeneous PPP of intensity `lambda` on the window.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, window: &Window, rng: &mut R) -> Vec<Point> {
    let mean = lambda * window.area();
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count = Poisson::new(mean).map(|p| p.sample(rng)).unwrap_or(0.0) as usize;
    (0..count)
        .map(|_| [rng.random::<f64>() * window.side, rng.random::<f64>() * window.side])
        .collect()
}

/// Bucketed point set supporting nearest-neighbour and radius queries on the torus.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    window: Window,
    cells: usize,
    cell_side: f64,
    // CSR layout: points of cell c are order[start[c]..start[c + 1]]
    start: Vec<u32>,
    order: Vec<u32>,
    points: Vec<Point>,
}

impl SpatialGrid {
    pub fn new(points: Vec<Point>, window: Window) -> Self {
        let n = points.len().max(1);
        let density = n as f64 / window.area();
        let cells = ((window.side * density.sqrt()).floor() as usize).clamp(1, 4096);
        let cell_side = window.side / cells as f64;
        let total = cells * cells;
        let mut counts = vec![0u32; total + 1];
        let cell_of: Vec<usize> = points
            .iter()
            .map(|p| {
                let cx = ((p[0] / cell_side) as usize).min(cells - 1);
                let cy = ((p[1] / cell_side) as usize).min(cells - 1);
                cy * cells + cx
            })
            .collect();
        for &c in &cell_of {
            counts[c + 1] += 1;
        }
        for c in 0..total {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut order = vec![0u32; points.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            order[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        Self {
            window,
            cells,
            cell_side,
            start: counts,
            order,
            points,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Empirical intensity of the indexed set.
    pub fn density(&self) -> f64 {
        self.points.len() as f64 / self.window.area()
    }

    fn home(&self, p: Point) -> (isize, isize) {
        let cx = ((p[0].rem_euclid(self.window.side) / self.cell_side) as isize).min(self.cells as isize - 1);
        let cy = ((p[1].rem_euclid(self.window.side) / self.cell_side) as isize).min(self.cells as isize - 1);
        (cx, cy)
    }

    fn cell_points(&self, cx: isize, cy: isize) -> &[u32] {
        let n = self.cells as isize;
        let c = (cy.rem_euclid(n) * n + cx.rem_euclid(n)) as usize;
        &self.order[self.start[c] as usize..self.start[c + 1] as usize]
    }

    /// Nearest point to `p`; ties go to the lowest index.
    pub fn nearest(&self, p: Point) -> Result<(usize, f64), SimError> {
        if self.points.is_empty() {
            return Err(SimError::EmptySet);
        }
        let n = self.cells as isize;
        let (hx, hy) = self.home(p);
        let mut best = (usize::MAX, f64::INFINITY);
        let consider = |idx: u32, best: &mut (usize, f64)| {
            let i = idx as usize;
            let d2 = self.window.distance_squared(p, self.points[i]);
            if d2 < best.1 || (d2 == best.1 && i < best.0) {
                *best = (i, d2);
            }
        };
        // Rings beyond half the grid would revisit cells; scan everything instead.
        let max_ring = (n - 1) / 2;
        for k in 0..=max_ring {
            if k == 0 {
                for &idx in self.cell_points(hx, hy) {
                    consider(idx, &mut best);
                }
            } else {
                for dx in -k..=k {
                    for &idx in self.cell_points(hx + dx, hy - k) {
                        consider(idx, &mut best);
                    }
                    for &idx in self.cell_points(hx + dx, hy + k) {
                        consider(idx, &mut best);
                    }
                }
                for dy in (-k + 1)..k {
                    for &idx in self.cell_points(hx - k, hy + dy) {
                        consider(idx, &mut best);
                    }
                    for &idx in self.cell_points(hx + k, hy + dy) {
                        consider(idx, &mut best);
                    }
                }
            }
            // every point outside rings 0..=k lies at least k cell sides away
            let covered = k as f64 * self.cell_side;
            if best.1 <= covered * covered {
                return Ok((best.0, best.1.sqrt()));
            }
        }
        for idx in 0..self.points.len() as u32 {
            consider(idx, &mut best);
        }
        Ok((best.0, best.1.sqrt()))
    }

    /// Calls `visit(index, squared distance)` for every point within `radius`
    /// of `p`, each exactly once, in a fixed order.
    pub fn for_each_within<F: FnMut(usize, f64)>(&self, p: Point, radius: f64, mut visit: F) {
        let n = self.cells as isize;
        let reach = (radius / self.cell_side).ceil() as isize;
        let r2 = radius * radius;
        let mut scan = |slice: &[u32]| {
            for &idx in slice {
                let i = idx as usize;
                let d2 = self.window.distance_squared(p, self.points[i]);
                if d2 <= r2 {
                    visit(i, d2);
                }
            }
        };
        if 2 * reach + 1 >= n {
            let all: Vec<u32> = (0..self.points.len() as u32).collect();
            scan(&all);
            return;
        }
        let (hx, hy) = self.home(p);
        let (lo, hi) = ((hx - reach).rem_euclid(n) as usize, (hx + reach).rem_euclid(n) as usize);
        let cells = self.cells;
        for dy in -reach..=reach {
            let row = (hy + dy).rem_euclid(n) as usize * cells;
            let run = |from: usize, to: usize| {
                &self.order[self.start[row + from] as usize..self.start[row + to + 1] as usize]
            };
            // the column window is contiguous unless it wraps past the edge
            if lo <= hi {
                scan(run(lo, hi));
            } else {
                scan(run(lo, cells - 1));
                scan(run(0, hi));
            }
        }
    }
}
