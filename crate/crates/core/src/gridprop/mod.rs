//! Sampled wavefunctions on uniform periodic grids.
//!
//! Grids are cell-centred: node `j` sits at `y_min + (j + ½)·spacing`, so a
//! grid symmetric about zero has no node at the origin and a centred hard
//! aperture of width `m·spacing` covers exactly `m` nodes.

mod aperture;
mod propagate;
mod wave;

pub use aperture::{apply_aperture, condition_on_coincidence, Aperture, ApertureOutcome, POST_SELECTION_FLOOR};
pub use propagate::{EdgeGuard, FreeEvolution, DEFAULT_EDGE_POINTS, DEFAULT_EDGE_TOLERANCE};
pub use wave::{
    discretize_1d, discretize_2d, Analytic1D, SampledWavefunction1D, SampledWavefunction2D, SUPPORT_TOLERANCE,
};

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output;

pub const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    One,
    Two,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::One => 1,
            Axis::Two => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    y_min: f64,
    y_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(y_min: f64, y_max: f64, n_points: usize) -> Result<Self> {
        if !(y_min < y_max) || !y_min.is_finite() || !y_max.is_finite() {
            return Err(Error::InvalidParameter(format!("grid needs y_min < y_max, got [{y_min}, {y_max}]")));
        }
        if n_points < MIN_GRID_POINTS || !n_points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two >= {MIN_GRID_POINTS}, got {n_points}"
            )));
        }
        Ok(Self { y_min, y_max, n_points })
    }

    /// `[-half_extent, half_extent]` with `n_points` cells.
    pub fn symmetric(half_extent: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_extent, half_extent, n_points)
    }

    /// Symmetric grid with an exact cell size.
    pub fn with_spacing(spacing: f64, n_points: usize) -> Result<Self> {
        Self::symmetric(0.5 * spacing * n_points as f64, n_points)
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extent(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn spacing(&self) -> f64 {
        self.extent() / self.n_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.y_min + (j as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / self.extent();
        (0..n).map(|j| if j < n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk }).collect()
    }
}

/// Probability density sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDensity {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

impl SampledDensity {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!("{} samples on a {}-point grid", values.len(), grid.len())));
        }
        Ok(Self { grid, values })
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }

    pub fn mean(&self) -> Result<f64> {
        let mass = self.mass();
        if !(mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        let first: f64 = self.values.iter().enumerate().map(|(j, v)| self.grid.node(j) * v).sum();
        Ok(first * self.grid.spacing() / mass)
    }

    pub fn stdev(&self) -> Result<f64> {
        let mean = self.mean()?;
        // Centred second moment avoids cancellation for offset densities.
        let second: f64 = self.values.iter().enumerate().map(|(j, v)| (self.grid.node(j) - mean).powi(2) * v).sum();
        Ok((second * self.grid.spacing() / self.mass()).max(0.0).sqrt())
    }

    /// Largest pointwise difference from another density on the same grid.
    pub fn sup_distance(&self, other: &SampledDensity) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch("densities live on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// `(y, density)` rows under `#`-prefixed metadata lines.
    pub fn write_csv<W: Write>(&self, w: W, metadata: &[(String, String)]) -> Result<()> {
        let rows = self.values.iter().enumerate().map(|(j, v)| vec![self.grid.node(j), *v]);
        let mut meta = metadata.to_vec();
        meta.push(("grid_y_min".into(), self.grid.y_min().to_string()));
        meta.push(("grid_y_max".into(), self.grid.y_max().to_string()));
        meta.push(("grid_points".into(), self.grid.len().to_string()));
        output::write_numeric_csv(w, &meta, &["y", "density"], rows)
    }
}

/// `|ψ|²` integrated over the other axis.
pub fn marginal_density(psi: &SampledWavefunction2D, axis: Axis) -> SampledDensity {
    psi.marginal(axis)
}

/// `√(⟨y²⟩ − ⟨y⟩²)` of a sampled density.
pub fn density_stdev(density: &SampledDensity) -> Result<f64> {
    density.stdev()
}
