//! Spatial grids for the solver and the coefficient nets.
//!
//! A grid samples `[-L, L)^n` uniformly with `N` points per axis at spacing
//! `h = 2L/N` (the periodic convention; zero-padded grids use the same
//! sampling and treat everything outside as zero). Fields over a grid are
//! stored as flat `Vec<C64>` in row-major order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Wrap-around derivatives; fields are `2L`-periodic.
    Periodic,
    /// Compactly supported data on a domain large enough that nothing
    /// reaches the boundary over the time horizon; outside values are zero.
    ZeroPadded,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid {
    /// Space dimension (1 or 2).
    pub dim: usize,
    /// Half-extent `L`; the domain is `[-L, L)` per axis.
    pub extent: f64,
    /// Points per axis.
    pub points: usize,
    pub boundary: BoundaryMode,
    /// CFL safety factor `theta <= 0.5`; the solver sets
    /// `dt = theta * h / sqrt(max_eps max_x sum_i a_i_eps)`.
    pub cfl: f64,
    /// Time horizon `T`.
    pub horizon: f64,
    /// Steps between stored checkpoints.
    pub checkpoint_stride: usize,
}

impl Grid {
    pub fn new_1d(points: usize, extent: f64, boundary: BoundaryMode) -> Self {
        Grid {
            dim: 1,
            extent,
            points,
            boundary,
            cfl: 0.4,
            horizon: 1.0,
            checkpoint_stride: 16,
        }
    }

    pub fn new_2d(points: usize, extent: f64, boundary: BoundaryMode) -> Self {
        Grid {
            dim: 2,
            extent,
            points,
            boundary,
            cfl: 0.4,
            horizon: 1.0,
            checkpoint_stride: 16,
        }
    }

    pub fn with_horizon(mut self, t: f64) -> Self {
        self.horizon = t;
        self
    }

    pub fn with_cfl(mut self, theta: f64) -> Self {
        self.cfl = theta;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.checkpoint_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::Config(format!(
                "grid dimension {} unsupported (1 or 2)",
                self.dim
            )));
        }
        if self.points < 8 {
            return Err(Error::Resolution(format!(
                "{} points per axis is too coarse",
                self.points
            )));
        }
        if !(self.extent > 0.0) {
            return Err(Error::Config("grid extent must be positive".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::Config(format!(
                "CFL factor {} outside (0, 0.5]",
                self.cfl
            )));
        }
        if self.checkpoint_stride == 0 {
            return Err(Error::Config("checkpoint stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Grid spacing `h = 2L/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight `h^n` of one grid cell.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Coordinate along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }

    /// 1D coordinates.
    pub fn axis(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    /// Flat index of a 2D point.
    #[inline]
    pub fn idx2(&self, i: usize, j: usize) -> usize {
        i * self.points + j
    }

    /// Sample a scalar function of one variable on the 1D grid.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<C64> {
        assert_eq!(self.dim, 1);
        (0..self.points)
            .map(|i| C64::new(f(self.coord(i)), 0.0))
            .collect()
    }

    /// Sample a scalar function of two variables on the 2D grid.
    pub fn sample2(&self, f: impl Fn(f64, f64) -> f64) -> Vec<C64> {
        assert_eq!(self.dim, 2);
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.points {
            for j in 0..self.points {
                out.push(C64::new(f(self.coord(i), self.coord(j)), 0.0));
            }
        }
        out
    }

    /// Grid L2 norm `(h^n sum |u|^2)^{1/2}`.
    pub fn l2_norm(&self, u: &[C64]) -> f64 {
        (u.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell()).sqrt()
    }

    /// Grid L2 inner product `h^n sum a_i conj(b_i)` restricted to real parts.
    pub fn l2_inner_re(&self, a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x * y.conj()).re)
            .sum::<f64>()
            * self.cell()
    }

    /// Sup norm of the modulus.
    pub fn sup_norm(&self, u: &[C64]) -> f64 {
        u.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && (self.extent - other.extent).abs() < 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_coords() {
        let g = Grid::new_1d(256, 4.0, BoundaryMode::Periodic);
        assert_eq!(g.spacing(), 8.0 / 256.0);
        assert_eq!(g.coord(0), -4.0);
        assert!((g.coord(128) - 0.0).abs() < 1e-15);
        assert_eq!(g.len(), 256);
    }

    #[test]
    fn l2_of_constant() {
        let g = Grid::new_1d(64, 1.0, BoundaryMode::Periodic);
        let u = vec![C64::new(3.0, 0.0); 64];
        // ||3||_{L2[-1,1)} = 3*sqrt(2)
        assert!((g.l2_norm(&u) - 3.0 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_cfl() {
        let g = Grid::new_1d(64, 1.0, BoundaryMode::Periodic).with_cfl(0.9);
        assert!(g.validate().is_err());
    }
}
