//! Exact free evolution in momentum space.
//!
//! Each axis is multiplied by `exp(−iħk²t/2m)` between a forward and an
//! inverse FFT. The grid is periodic, so anything that reaches an edge wraps
//! around; [`EdgeGuard`] checks the evolved state for that afterwards.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Grid1D, SampledWavefunction1D, SampledWavefunction2D};
use crate::error::{Error, Result};
use crate::gaussian::PhysicalParams;
use crate::par;

pub const DEFAULT_EDGE_POINTS: usize = 5;
pub const DEFAULT_EDGE_TOLERANCE: f64 = 1e-6;

/// Post-evolution wrap-around check: the fraction of the norm sitting in the
/// outermost `edge_points` cells at either end of an axis must stay below the
/// axis tolerance. `None` disables the check on that axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGuard {
    pub edge_points: usize,
    pub axis1: Option<f64>,
    pub axis2: Option<f64>,
}

impl Default for EdgeGuard {
    fn default() -> Self {
        Self {
            edge_points: DEFAULT_EDGE_POINTS,
            axis1: Some(DEFAULT_EDGE_TOLERANCE),
            axis2: Some(DEFAULT_EDGE_TOLERANCE),
        }
    }
}

impl EdgeGuard {
    pub fn disabled() -> Self {
        Self { edge_points: DEFAULT_EDGE_POINTS, axis1: None, axis2: None }
    }

    fn check(&self, axis: usize, masses: &[f64]) -> Result<()> {
        let tolerance = match axis {
            1 => self.axis1,
            _ => self.axis2,
        };
        let Some(tolerance) = tolerance else { return Ok(()) };
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Ok(());
        }
        let k = self.edge_points.min(masses.len() / 2);
        let edge: f64 = masses[..k].iter().chain(&masses[masses.len() - k..]).sum();
        let edge_mass = edge / total;
        if edge_mass > tolerance {
            return Err(Error::GridTooSmallForTime { axis, edge_mass, tolerance });
        }
        Ok(())
    }
}

fn phases(grid: &Grid1D, t: f64, p: &PhysicalParams) -> Vec<Complex64> {
    let c = p.hbar * t / (2.0 * p.mass);
    grid.wavenumbers().into_iter().map(|k| Complex64::from_polar(1.0, -c * k * k)).collect()
}

// Rows per parallel task, so short rows still give tasks of useful size.
fn rows_per_task(row_len: usize) -> usize {
    (16_384 / row_len).max(1)
}

fn fft_rows(data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
    let len = fft.len();
    let scratch_len = fft.get_inplace_scratch_len();
    par::for_each_chunk_mut_init(
        data,
        len * rows_per_task(len),
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, chunk| fft.process_with_scratch(chunk, scratch),
    );
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::new(0.0, 0.0); src.len()];
    par::for_each_chunk_mut(&mut dst, rows, |c, out| {
        for (r, z) in out.iter_mut().enumerate() {
            *z = src[r * cols + c];
        }
    });
    dst
}

fn validate_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("evolution time must be non-negative, got {t}")));
    }
    Ok(())
}

/// Free-particle evolution of a sampled state.
pub trait FreeEvolution: Sized {
    /// Evolves in place; the state is left evolved even if the guard fails.
    fn propagate_in_place(&mut self, t: f64, p: &PhysicalParams, guard: &EdgeGuard) -> Result<()>;

    fn propagate_free_guarded(&self, t: f64, p: &PhysicalParams, guard: &EdgeGuard) -> Result<Self>
    where
        Self: Clone,
    {
        let mut out = self.clone();
        out.propagate_in_place(t, p, guard)?;
        Ok(out)
    }

    /// Evolution with the default edge guard on every axis.
    fn propagate_free(&self, t: f64, p: &PhysicalParams) -> Result<Self>
    where
        Self: Clone,
    {
        self.propagate_free_guarded(t, p, &EdgeGuard::default())
    }
}

impl FreeEvolution for SampledWavefunction1D {
    fn propagate_in_place(&mut self, t: f64, p: &PhysicalParams, guard: &EdgeGuard) -> Result<()> {
        validate_time(t)?;
        if t > 0.0 {
            let n = self.grid.len();
            let mut planner = FftPlanner::new();
            planner.plan_fft_forward(n).process(&mut self.amplitudes);
            let scale = 1.0 / n as f64;
            for (z, ph) in self.amplitudes.iter_mut().zip(phases(&self.grid, t, p)) {
                *z *= ph * scale;
            }
            planner.plan_fft_inverse(n).process(&mut self.amplitudes);
        }
        let masses: Vec<f64> = self.amplitudes.iter().map(|z| z.norm_sqr()).collect();
        guard.check(1, &masses)
    }
}

impl FreeEvolution for SampledWavefunction2D {
    fn propagate_in_place(&mut self, t: f64, p: &PhysicalParams, guard: &EdgeGuard) -> Result<()> {
        validate_time(t)?;
        let (n1, n2) = self.shape();
        if t > 0.0 {
            let mut planner = FftPlanner::new();
            let (fwd1, inv1) = (planner.plan_fft_forward(n1), planner.plan_fft_inverse(n1));
            let (fwd2, inv2) = (planner.plan_fft_forward(n2), planner.plan_fft_inverse(n2));
            let ph1 = phases(&self.grid1, t, p);
            let ph2 = phases(&self.grid2, t, p);
            let scale = 1.0 / (n1 as f64 * n2 as f64);

            fft_rows(&mut self.amplitudes, &fwd2);
            let mut cols = transpose(&self.amplitudes, n1, n2);
            self.amplitudes = Vec::new();
            fft_rows(&mut cols, &fwd1);
            par::for_each_chunk_mut(&mut cols, n1, |i2, row| {
                let f = ph2[i2] * scale;
                for (z, p1) in row.iter_mut().zip(&ph1) {
                    *z *= p1 * f;
                }
            });
            fft_rows(&mut cols, &inv1);
            self.amplitudes = transpose(&cols, n2, n1);
            drop(cols);
            fft_rows(&mut self.amplitudes, &inv2);
        }
        guard.check(1, &self.marginal(super::Axis::One).values)?;
        guard.check(2, &self.marginal(super::Axis::Two).values)
    }
}
