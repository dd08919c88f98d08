//! Cell-centered radial grids and grid functions.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::Params;

/// Uniform cell-centered grid on `(r_min, r_max)` with radial measure
/// `r^{N-1} dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
    pub dim: u32,
    pub dr: f64,
    /// Cell centers.
    pub r: Vec<f64>,
    /// Face radii, `n + 1` entries.
    pub faces: Vec<f64>,
    /// `r^{N-1}` at the faces.
    pub areas: Vec<f64>,
    /// `(r_+^N - r_-^N) / N`, the exact cell measure.
    pub volumes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n: usize, dim: u32) -> Result<Self> {
        if !(r_min >= 0.0) || !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::InvalidInput("need 0 <= r_min < r_max"));
        }
        if n < 4 {
            return Err(Error::InvalidInput("grid needs at least four cells"));
        }
        if dim < 1 {
            return Err(Error::InvalidInput("dimension must be positive"));
        }
        let dr = (r_max - r_min) / n as f64;
        let nf = dim as f64;
        let faces: Vec<f64> = (0..=n).map(|i| r_min + i as f64 * dr).collect();
        let areas = faces.iter().map(|r| r.powi(dim as i32 - 1)).collect();
        let volumes = faces
            .windows(2)
            .map(|w| (w[1].powi(dim as i32) - w[0].powi(dim as i32)) / nf)
            .collect();
        let r = (0..n).map(|i| r_min + (i as f64 + 0.5) * dr).collect();
        Ok(Self { r_min, r_max, n, dim, dr, r, faces, areas, volumes })
    }

    /// Grid on `(0, r_max)`.
    pub fn origin(r_max: f64, n: usize, dim: u32) -> Result<Self> {
        Self::new(0.0, r_max, n, dim)
    }

    /// The grid with half as many cells on the same interval.
    pub fn coarsened(&self) -> Result<Self> {
        if self.n % 2 != 0 {
            return Err(Error::InvalidInput("coarsening needs an even cell count"));
        }
        Self::new(self.r_min, self.r_max, self.n / 2, self.dim)
    }

    /// Cell averages of `u` (given on this grid) over pairs of cells.
    pub fn restrict(&self, u: &[f64]) -> Vec<f64> {
        u.chunks_exact(2)
            .zip(self.volumes.chunks_exact(2))
            .map(|(a, v)| (a[0] * v[0] + a[1] * v[1]) / (v[0] + v[1]))
            .collect()
    }

    /// `∫ g r^{N-1} dr` by the midpoint rule on cell values.
    pub fn integrate(&self, g: &[f64]) -> f64 {
        g.iter().zip(&self.volumes).map(|(a, v)| a * v).sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }
}

/// Radially symmetric grid function `u(r, t)` for the regularized problem
/// with potential `K (r + eps)^{-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    pub t: f64,
    pub params: Params,
    pub eps: f64,
}

impl RadialField {
    pub fn new(grid: RadialGrid, u: Vec<f64>, t: f64, params: Params, eps: f64) -> Result<Self> {
        if u.len() != grid.n {
            return Err(Error::InvalidInput("field length differs from the grid"));
        }
        if u.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("field values must be finite and nonnegative"));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidInput("eps must be finite and nonnegative"));
        }
        if eps == 0.0 && grid.r_min == 0.0 {
            return Err(Error::InvalidInput("eps = 0 needs a grid excluding the origin"));
        }
        if grid.dim != params.n() {
            return Err(Error::InvalidInput("grid dimension differs from N"));
        }
        Ok(Self { grid, u, t, params, eps })
    }

    /// Samples `u0(r)` at the cell centers.
    pub fn from_fn(
        grid: RadialGrid,
        params: Params,
        eps: f64,
        u0: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let u = grid.r.iter().map(|r| u0(*r)).collect();
        Self::new(grid, u, 0.0, params, eps)
    }

    /// `u0(r) = M max(0, 1 - (r/R)^2)^2`.
    pub fn bump(grid: RadialGrid, params: Params, eps: f64, height: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !(height >= 0.0) {
            return Err(Error::InvalidInput("bump needs R > 0 and M >= 0"));
        }
        Self::from_fn(grid, params, eps, |r| {
            let s = (1.0 - (r / radius).powi(2)).max(0.0);
            height * s * s
        })
    }

    /// Same data with another regularization.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.u.clone(), self.t, self.params, eps)
    }

    /// `∫ u r^{N-1} dr`.
    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.u)
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(0.0, f64::max)
    }

    /// `(∫ u^q r^{N-1} dr)^{1/q}`.
    pub fn lq_norm(&self, q: f64) -> f64 {
        let s: f64 = self.u.iter().zip(&self.grid.volumes).map(|(a, v)| a.powf(q) * v).sum();
        s.powf(1.0 / q)
    }

    /// `max u` over the cells with `r >= delta`.
    pub fn linf_outside(&self, delta: f64) -> f64 {
        self.grid
            .r
            .iter()
            .zip(&self.u)
            .filter(|(r, _)| **r >= delta)
            .fold(0.0, |a, (_, v)| a.max(*v))
    }

    /// Outer face of the last positive cell, or `r_min` for zero data.
    pub fn support_radius(&self) -> f64 {
        match self.u.iter().rposition(|v| *v > 0.0) {
            Some(i) => self.grid.faces[i + 1],
            None => self.grid.r_min,
        }
    }
}

/// `∫_{r >= r_from} |a - b| r^{N-1} dr / ∫_{r >= r_from} |b| r^{N-1} dr`.
pub fn relative_l1(grid: &RadialGrid, a: &[f64], b: &[f64], r_from: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..grid.n {
        if grid.r[i] >= r_from {
            num += (a[i] - b[i]).abs() * grid.volumes[i];
            den += b[i].abs() * grid.volumes[i];
        }
    }
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}
