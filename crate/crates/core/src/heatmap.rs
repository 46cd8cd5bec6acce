//! Group attention heatmaps.
//!
//! Each fixation deposits a Gaussian bump (sigma = `sigma_scale * radius`)
//! whose total mass equals its duration. Mass is stored as integer quanta
//! of [`MASS_QUANTUM_S`] seconds, and grids add exactly: accumulating
//! two sets of paths separately and summing gives the same grid as
//! accumulating their union.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::registry::AoiRegistry;
use crate::scanpath::{Fixation, Scanpath};

/// 2^-40 s per stored unit.
pub const MASS_QUANTUM_S: f64 = 1.0 / (1u64 << 40) as f64;

/// Kernels are evaluated within this many sigmas of the center.
const KERNEL_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeatGrid {
    pub width: usize,
    pub height: usize,
    pub cell_size: u32,
    /// Row-major mass in quanta.
    cells: Vec<i64>,
}

impl HeatGrid {
    pub fn zeros(width: usize, height: usize, cell_size: u32) -> Self {
        Self {
            width,
            height,
            cell_size,
            cells: vec![0; width * height],
        }
    }

    /// Grid covering the registry canvas.
    pub fn for_registry(registry: &AoiRegistry, cell_size: u32) -> Result<Self> {
        if cell_size == 0 {
            return Err(Error::validation("cell size must be > 0"));
        }
        let cs = f64::from(cell_size);
        let width = libm::ceil(registry.canvas_w() / cs).max(1.0) as usize;
        let height = libm::ceil(registry.canvas_h() / cs).max(1.0) as usize;
        Ok(Self::zeros(width, height, cell_size))
    }

    /// Mass of a cell in seconds.
    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.cells[row * self.width + col] as f64 * MASS_QUANTUM_S
    }

    pub fn values(&self) -> Vec<f64> {
        self.cells.iter().map(|&c| c as f64 * MASS_QUANTUM_S).collect()
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum::<i64>() as f64 * MASS_QUANTUM_S
    }

    pub fn max_value(&self) -> f64 {
        self.cells.iter().copied().max().unwrap_or(0) as f64 * MASS_QUANTUM_S
    }

    /// `(col, row)` of the heaviest cell; first in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let idx = self
            .cells
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > self.cells[best] { i } else { best });
        (idx % self.width, idx / self.width)
    }

    /// Pixel center of a cell.
    pub fn cell_center(&self, col: usize, row: usize) -> (f64, f64) {
        let cs = f64::from(self.cell_size);
        ((col as f64 + 0.5) * cs, (row as f64 + 0.5) * cs)
    }

    fn check_same_shape(&self, other: &HeatGrid) -> Result<()> {
        if (self.width, self.height, self.cell_size) != (other.width, other.height, other.cell_size) {
            return Err(Error::validation(alloc::format!(
                "grid shapes differ: {}x{}@{} vs {}x{}@{}",
                self.width,
                self.height,
                self.cell_size,
                other.width,
                other.height,
                other.cell_size
            )));
        }
        Ok(())
    }

    /// Cellwise sum; exact.
    pub fn add(&mut self, other: &HeatGrid) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a += b;
        }
        Ok(())
    }

    /// Deposits one fixation's bump.
    pub fn deposit(&mut self, fixation: &Fixation, sigma_scale: f64) {
        let mass = libm::round(fixation.time_spent_s / MASS_QUANTUM_S) as i64;
        if mass <= 0 {
            return;
        }
        let cs = f64::from(self.cell_size);
        let sigma = (sigma_scale * fixation.radius).max(1e-9);
        let reach = KERNEL_SIGMAS * sigma;
        let cell_range = |center: f64, n: usize| {
            let lo = libm::floor((center - reach) / cs).max(0.0) as usize;
            let hi = (libm::floor((center + reach) / cs).max(0.0) as usize).min(n - 1);
            let home = ((center / cs).max(0.0) as usize).min(n - 1);
            (lo.min(home), hi.max(home))
        };
        let (c0, c1) = cell_range(fixation.x, self.width);
        let (r0, r1) = cell_range(fixation.y, self.height);

        let mut weights = Vec::with_capacity((c1 - c0 + 1) * (r1 - r0 + 1));
        for row in r0..=r1 {
            for col in c0..=c1 {
                let (cx, cy) = self.cell_center(col, row);
                let (dx, dy) = (cx - fixation.x, cy - fixation.y);
                let d2 = dx * dx + dy * dy;
                weights.push((row * self.width + col, libm::exp(-d2 / (2.0 * sigma * sigma))));
            }
        }
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        if total.is_nan() || total <= 0.0 {
            // Kernel underflowed everywhere: put the mass in the home cell.
            let home = ((fixation.y / cs) as usize).min(self.height - 1) * self.width
                + ((fixation.x / cs) as usize).min(self.width - 1);
            self.cells[home] += mass;
            return;
        }

        // Largest-remainder rounding keeps the deposited integer mass exact.
        let mut shares: Vec<(usize, i64, f64)> = weights
            .iter()
            .map(|&(idx, w)| {
                let exact = mass as f64 * (w / total);
                let floor = libm::floor(exact);
                (idx, floor as i64, exact - floor)
            })
            .collect();
        let assigned: i64 = shares.iter().map(|s| s.1).sum();
        let mut remainder = mass - assigned;
        if remainder != 0 {
            let mut order: Vec<usize> = (0..shares.len()).collect();
            order.sort_by(|&a, &b| shares[b].2.total_cmp(&shares[a].2).then(a.cmp(&b)));
            let step = remainder.signum();
            for &i in order.iter().cycle() {
                if remainder == 0 {
                    break;
                }
                shares[i].1 += step;
                remainder -= step;
            }
        }
        for (idx, units, _) in shares {
            self.cells[idx] += units;
        }
    }
}

/// Sum of every fixation's bump over all `paths`.
pub fn accumulate_heatmap(
    paths: &[Scanpath],
    registry: &AoiRegistry,
    cell_size: u32,
    sigma_scale: f64,
) -> Result<HeatGrid> {
    if !(sigma_scale.is_finite() && sigma_scale > 0.0) {
        return Err(Error::validation(alloc::format!(
            "sigma scale must be > 0, got {sigma_scale}"
        )));
    }
    let mut grid = HeatGrid::for_registry(registry, cell_size)?;
    for path in paths {
        for f in &path.fixations {
            grid.deposit(f, sigma_scale);
        }
    }
    Ok(grid)
}

/// Difference of two heatmaps after each is scaled to unit total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGrid {
    pub width: usize,
    pub height: usize,
    pub cell_size: u32,
    /// Row-major.
    pub values: Vec<f64>,
}

impl SignedGrid {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Split into (positive part, magnitude of negative part).
    pub fn split(&self) -> (Vec<f64>, Vec<f64>) {
        let pos = self.values.iter().map(|&v| v.max(0.0)).collect();
        let neg = self.values.iter().map(|&v| (-v).max(0.0)).collect();
        (pos, neg)
    }
}

/// `a / |a| - b / |b|` cellwise. An all-zero input stays all zero.
pub fn diff_heatmap(a: &HeatGrid, b: &HeatGrid) -> Result<SignedGrid> {
    a.check_same_shape(b)?;
    fn norm(g: &HeatGrid) -> impl Iterator<Item = f64> + '_ {
        let total: i64 = g.cells.iter().sum();
        let t = total as f64;
        g.cells
            .iter()
            .map(move |&c| if total == 0 { 0.0 } else { c as f64 / t })
    }
    let values = norm(a).zip(norm(b)).map(|(x, y)| x - y).collect();
    Ok(SignedGrid {
        width: a.width,
        height: a.height,
        cell_size: a.cell_size,
        values,
    })
}
